"""Feed-forward ReLU networks and their lifted compact form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import block_diag

from riskverify.errors import DimensionMismatch, UnsupportedActivation

FloatArray = NDArray[np.float64]

SUPPORTED_ACTIVATIONS = frozenset({"relu"})


def relu(z: FloatArray) -> FloatArray:
    return np.maximum(z, 0.0)


@dataclass(frozen=True, eq=False)
class DenseLayer:
    """Affine map x ↦ Wx + b."""

    weights: FloatArray
    bias: FloatArray

    def __post_init__(self) -> None:
        weights = np.atleast_2d(np.asarray(self.weights, dtype=float))
        bias = np.asarray(self.bias, dtype=float).ravel()
        if bias.shape != (weights.shape[0],):
            raise DimensionMismatch(
                f"bias length {bias.shape[0]} does not match {weights.shape[0]} weight rows"
            )
        weights.setflags(write=False)
        bias.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)

    @property
    def in_dim(self) -> int:
        return int(self.weights.shape[1])

    @property
    def out_dim(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True, eq=False)
class Network:
    """ReLU MLP: hidden layers x^{k+1} = φ(W^k x^k + b^k), output W^ℓ x^ℓ + b^ℓ."""

    layers: tuple[DenseLayer, ...]
    output: DenseLayer
    activation: str = "relu"
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.activation not in SUPPORTED_ACTIVATIONS:
            raise UnsupportedActivation(f"unsupported activation {self.activation!r}")
        layers = tuple(self.layers)
        if not layers:
            raise DimensionMismatch("network needs at least one hidden layer")
        chain = [*layers, self.output]
        for k in range(1, len(chain)):
            if chain[k].in_dim != chain[k - 1].out_dim:
                name = "output" if k == len(layers) else f"layer {k}"
                raise DimensionMismatch(
                    f"{name} expects {chain[k].in_dim} inputs but layer {k - 1} "
                    f"produces {chain[k - 1].out_dim}"
                )
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_arrays(
        cls,
        weights: list[ArrayLike],
        biases: list[ArrayLike],
        metadata: dict[str, Any] | None = None,
    ) -> Network:
        """Build from per-layer arrays; the last pair is the output map."""
        if len(weights) != len(biases) or len(weights) < 2:
            raise DimensionMismatch("need matching weights/biases for >= 1 hidden layer + output")
        dense = [DenseLayer(np.asarray(w), np.asarray(b)) for w, b in zip(weights, biases)]
        return cls(tuple(dense[:-1]), dense[-1], metadata=dict(metadata or {}))

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.output.out_dim

    @property
    def hidden_widths(self) -> list[int]:
        return [layer.out_dim for layer in self.layers]

    @property
    def hidden_dim(self) -> int:
        """Total hidden width d = Σ n_k over hidden layers."""
        return sum(self.hidden_widths)

    def __call__(self, x: ArrayLike) -> FloatArray:
        return evaluate(self, x)


def forward(net: Network, x: ArrayLike) -> tuple[FloatArray, list[FloatArray]]:
    """Evaluate one input and return (output, [x⁰, …, x^ℓ]).

    Raises:
        DimensionMismatch: If len(x) differs from the input width.
    """
    state = np.asarray(x, dtype=float).ravel()
    if state.shape[0] != net.input_dim:
        raise DimensionMismatch(f"input has length {state.shape[0]}, expected {net.input_dim}")
    trajectory = [state]
    for layer in net.layers:
        state = relu(layer.weights @ state + layer.bias)
        trajectory.append(state)
    return net.output.weights @ state + net.output.bias, trajectory


def evaluate(net: Network, x: ArrayLike) -> FloatArray:
    """Row-wise network output for an (N, n₀) batch (or a single vector)."""
    batch = np.asarray(x, dtype=float)
    single = batch.ndim == 1
    batch = np.atleast_2d(batch)
    if batch.shape[1] != net.input_dim:
        raise DimensionMismatch(f"input has {batch.shape[1]} columns, expected {net.input_dim}")
    state = batch
    for layer in net.layers:
        state = relu(state @ layer.weights.T + layer.bias)
    out = state @ net.output.weights.T + net.output.bias
    return out[0] if single else out


def lifted_trajectories(net: Network, x: ArrayLike) -> FloatArray:
    """Stacked [x⁰; …; x^ℓ] per row of an (N, n₀) batch, shape (N, n̄ − 1)."""
    state = np.atleast_2d(np.asarray(x, dtype=float))
    if state.shape[1] != net.input_dim:
        raise DimensionMismatch(f"input has {state.shape[1]} columns, expected {net.input_dim}")
    blocks = [state]
    for layer in net.layers:
        state = relu(state @ layer.weights.T + layer.bias)
        blocks.append(state)
    return np.hstack(blocks)


@dataclass(frozen=True, eq=False)
class CompactForm:
    """Lifted network description with 𝐁𝐱 = φ(𝐀𝐱 + 𝐛) on trajectories 𝐱."""

    big_a: FloatArray
    big_b_vec: FloatArray
    big_b: FloatArray
    selectors: tuple[FloatArray, ...]
    out_weights: FloatArray
    out_bias: FloatArray

    @property
    def lifted_dim(self) -> int:
        """n̄ = Σ_{k=0}^{ℓ} n_k + 1."""
        return int(self.big_a.shape[1]) + 1

    @property
    def input_dim(self) -> int:
        return int(self.selectors[0].shape[0])

    @property
    def hidden_dim(self) -> int:
        return int(self.big_a.shape[0])

    @property
    def output_dim(self) -> int:
        return int(self.out_weights.shape[0])


def compact_form(net: Network) -> CompactForm:
    """Build 𝐀 = [blockdiag(W⁰…W^{ℓ−1}) | 0], 𝐛, 𝐁 = [0 | I] and selectors E^k."""
    widths = [net.input_dim, *net.hidden_widths]
    total = sum(widths)
    d = net.hidden_dim

    diag = block_diag(*[layer.weights for layer in net.layers])
    big_a = np.hstack([diag, np.zeros((d, widths[-1]))])
    big_b_vec = np.concatenate([layer.bias for layer in net.layers])
    big_b = np.hstack([np.zeros((d, widths[0])), np.eye(d)])

    selectors = []
    offset = 0
    for width in widths:
        selector = np.zeros((width, total))
        selector[:, offset:offset + width] = np.eye(width)
        selectors.append(selector)
        offset += width

    return CompactForm(
        big_a=big_a,
        big_b_vec=big_b_vec,
        big_b=big_b,
        selectors=tuple(selectors),
        out_weights=np.array(net.output.weights),
        out_bias=np.array(net.output.bias),
    )
