"""Construct small ReLU networks: linear-gain controllers, pass-through and band classifiers."""

from __future__ import annotations

from typing import Literal

import numpy as np
from numpy.typing import ArrayLike

from riskverify.errors import InvalidParameter
from riskverify.logging import get_logger
from riskverify.network.model import DenseLayer, FloatArray, Network, evaluate

logger = get_logger("network.generator")

GainMethod = Literal["relu_split", "least_squares"]
GAIN_METHODS = frozenset({"relu_split", "least_squares"})


def _approximation_rms(net: Network, gain: FloatArray, scale: float, seed: int) -> float:
    rng = np.random.default_rng(seed)
    x = rng.normal(scale=scale, size=(4096, gain.shape[1]))
    residual = evaluate(net, x) - x @ gain.T
    return float(np.sqrt(np.mean(residual**2)))


def _relu_split(gain: FloatArray, hidden: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    m_u, n = gain.shape
    if hidden < 2 * m_u:
        raise InvalidParameter(f"relu_split needs at least {2 * m_u} hidden neurons, got {hidden}")
    positives = [1] * m_u
    for extra in range(hidden - 2 * m_u):
        positives[extra % m_u] += 1

    rows: list[FloatArray] = []
    out = np.zeros((m_u, hidden))
    col = 0
    for j in range(m_u):
        r = positives[j]
        # φ(s) split over r neurons φ(s/i) with output weights i/r: Σ (1/i)(i/r) = 1
        for i in range(1, r + 1):
            rows.append(gain[j] / i)
            out[j, col] = i / r
            col += 1
        rows.append(-gain[j])
        out[j, col] = -1.0
        col += 1
    return np.vstack(rows).reshape(hidden, n), np.zeros(hidden), out


def linear_gain_network(
    gain: ArrayLike,
    hidden: int = 3,
    method: GainMethod = "relu_split",
    seed: int = 0,
    scale: float = 1.0,
) -> Network:
    """One-hidden-layer ReLU network approximating x ↦ Kx.

    ``relu_split`` is exact (Kx = Σ wᵢφ(cᵢKx) − φ(−Kx)); ``least_squares``
    draws a random hidden layer and fits the output layer to samples.
    Method and achieved RMS error go into the network metadata.

    Args:
        gain: Gain matrix K (m_u × n).
        hidden: Hidden width.
        method: Construction method.
        seed: Seed for random features and error estimation.
        scale: Standard deviation of the inputs used for fitting and error estimation.
    """
    if method not in GAIN_METHODS:
        raise InvalidParameter(f"unknown method {method!r}")
    K = np.atleast_2d(np.asarray(gain, dtype=float))
    n = K.shape[1]

    if method == "relu_split":
        w0, b0, w1 = _relu_split(K, hidden)
        b1 = np.zeros(K.shape[0])
    else:
        rng = np.random.default_rng(seed)
        w0 = rng.normal(size=(hidden, n))
        b0 = rng.normal(scale=0.1 * scale, size=hidden)
        x = rng.normal(scale=scale, size=(2048, n))
        features = np.hstack([np.maximum(x @ w0.T + b0, 0.0), np.ones((x.shape[0], 1))])
        coef, *_ = np.linalg.lstsq(features, x @ K.T, rcond=None)
        w1 = coef[:-1].T
        b1 = coef[-1]

    net = Network((DenseLayer(w0, b0),), DenseLayer(w1, b1))
    rms = _approximation_rms(net, K, scale, seed + 1)
    logger.info("Built linear-gain network", extra={"method": method, "hidden": hidden, "rms": rms})
    return Network(
        net.layers,
        net.output,
        metadata={"method": method, "gain": K.tolist(), "approximation_rms": rms, "seed": seed},
    )


def identity_network(n: int, shift: float = 5.0) -> Network:
    """x ↦ φ(x + shift) − shift, the identity on {x > −shift}."""
    if shift <= 0:
        raise InvalidParameter("shift must be positive")
    eye = np.eye(n)
    return Network(
        (DenseLayer(eye, np.full(n, shift)),),
        DenseLayer(eye, np.full(n, -shift)),
        metadata={"method": "shifted_identity", "shift": shift},
    )


def fit_band_classifier(data: ArrayLike, labels: ArrayLike, margin: float = 0.5) -> Network:
    """Fit a 3-class ReLU classifier for classes laid out along one direction.

    Class means are projected on their principal direction u and sorted.
    With thresholds t₁ < t₂ at the midpoints between neighbouring means, the
    scores are f_low = φ(t₁ − uᵀx), f_high = φ(uᵀx − t₂) and f_mid = margin.

    Args:
        data: (N, n) feature matrix.
        labels: Integer labels 0, 1, 2.
        margin: Constant score of the middle class.
    """
    x = np.atleast_2d(np.asarray(data, dtype=float))
    y = np.asarray(labels).ravel()
    classes = np.unique(y)
    if classes.tolist() != [0, 1, 2]:
        raise InvalidParameter(f"band classifier needs labels 0, 1, 2; got {classes.tolist()}")
    if margin <= 0:
        raise InvalidParameter("margin must be positive")

    means = np.vstack([x[y == c].mean(axis=0) for c in classes])
    centred = means - means.mean(axis=0)
    _, eigvecs = np.linalg.eigh(centred.T @ centred)
    direction = eigvecs[:, -1]
    order = np.argsort(means @ direction)
    low, mid, high = (int(c) for c in classes[order])
    projected = np.sort(means @ direction)
    t_low = 0.5 * (projected[0] + projected[1])
    t_high = 0.5 * (projected[1] + projected[2])

    w0 = np.vstack([direction, -direction])
    b0 = np.array([-t_high, t_low])
    w1 = np.zeros((3, 2))
    w1[high, 0] = 1.0
    w1[low, 1] = 1.0
    b1 = np.zeros(3)
    b1[mid] = margin

    net = Network((DenseLayer(w0, b0),), DenseLayer(w1, b1))
    accuracy = float(np.mean(np.argmax(evaluate(net, x), axis=1) == y))
    logger.info("Fitted band classifier", extra={"accuracy": accuracy, "middle_class": mid})
    return Network(
        net.layers,
        net.output,
        metadata={
            "method": "band_fit",
            "margin": margin,
            "thresholds": [float(t_low), float(t_high)],
            "middle_class": mid,
            "training_accuracy": accuracy,
        },
    )
