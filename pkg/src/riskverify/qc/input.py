"""Risk-aware input QCs.

An input QC is a symmetric P with the set {x : [x;1]ᵀP[x;1] ≥ 0}. It is
admissible for a moment set when WC-CVaR_ε([x;1]ᵀ(−P)[x;1]) ≤ 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike

from riskverify.errors import DimensionMismatch, EmptyInput, SingularCovariance, ZeroNormal
from riskverify.risk import (
    MomentSet,
    QuadraticLoss,
    RiskLevel,
    as_risk_level,
    symmetrize,
    wc_cvar_quadratic_sign,
)
from riskverify.risk.moments import PSD_CLIP, FloatArray

if TYPE_CHECKING:
    from riskverify.config import Config

# Regularized covariances above this condition number are treated as singular.
MAX_CONDITION = 1e15


class InputGeometry(str, Enum):
    ELLIPSOID = "ellipsoid"
    POLYTOPE_FACE = "polytope-face"
    HYPERPLANE = "hyperplane"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class InputQc:
    """Input QC matrix P with its geometry tag.

    ``radius_sq`` is the k of an ellipsoid {(x−μ)ᵀΣ⁻¹(x−μ) ≤ k}; ``margin``
    is the closed-form worst-case CVaR of an affine face.
    """

    P: FloatArray
    geometry: InputGeometry
    radius_sq: float | None = None
    margin: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "P", symmetrize(self.P))

    @property
    def dim(self) -> int:
        return int(self.P.shape[0]) - 1

    @property
    def satisfied(self) -> bool | None:
        """Closed-form admissibility for affine faces; None for other geometries."""
        return None if self.margin is None else self.margin <= 0.0

    def risk_loss(self) -> QuadraticLoss:
        """The loss [x;1]ᵀ(−P)[x;1] whose worst-case CVaR must be ≤ 0."""
        return QuadraticLoss.from_matrix(-self.P)

    def is_admissible(
        self, ms: MomentSet, eps: RiskLevel | float, config: Config | None = None
    ) -> bool:
        """Check membership of −P in the risk-aware QC family via the CVaR program."""
        return wc_cvar_quadratic_sign(self.risk_loss(), ms, eps, config)

    def evaluate(self, x: ArrayLike) -> FloatArray:
        """[x;1]ᵀP[x;1] per row; nonnegative inside the set."""
        batch = np.atleast_2d(np.asarray(x, dtype=float))
        if batch.shape[1] != self.dim:
            raise DimensionMismatch(f"points have {batch.shape[1]} columns, expected {self.dim}")
        lifted = np.hstack([batch, np.ones((batch.shape[0], 1))])
        return np.einsum("ij,jk,ik->i", lifted, self.P, lifted)


def _inverse_covariance(ms: MomentSet, ridge: float) -> FloatArray:
    cov = ms.regularized_covariance(ridge)
    if np.linalg.cond(cov) > MAX_CONDITION:
        raise SingularCovariance("covariance is singular; apply a ridge before building the QC")
    return ms.inverse_covariance(ridge)


def _ellipsoid_matrix(ms: MomentSet, radius_sq: float, ridge: float) -> FloatArray:
    inv = _inverse_covariance(ms, ridge)
    shift = inv @ ms.mean
    n = ms.dim
    P = np.empty((n + 1, n + 1))
    P[:n, :n] = -inv
    P[:n, n] = shift
    P[n, :n] = shift
    P[n, n] = radius_sq - float(ms.mean @ shift)
    return P


def input_qc_ellipsoid(
    ms: MomentSet, eps: RiskLevel | float, ridge: float = PSD_CLIP
) -> InputQc:
    """Tight risk ellipsoid {x : (x−μ)ᵀΣ⁻¹(x−μ) ≤ n/ε}.

    Its worst-case CVaR sits exactly on the boundary (value 0).

    Raises:
        SingularCovariance: If Σ cannot be inverted.
    """
    level = as_risk_level(eps)
    radius_sq = ms.dim / level.epsilon
    return InputQc(_ellipsoid_matrix(ms, radius_sq, ridge), InputGeometry.ELLIPSOID, radius_sq)


def input_qc_confidence(ms: MomentSet, p: float, ridge: float = PSD_CLIP) -> InputQc:
    """Chance-constraint ellipsoid {x : (x−μ)ᵀΣ⁻¹(x−μ) ≤ n/(1−p)} at confidence p.

    Coincides with :func:`input_qc_ellipsoid` at ε = 1 − p.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"confidence level must be in (0,1), got {p}")
    radius_sq = ms.dim / (1.0 - p)
    return InputQc(_ellipsoid_matrix(ms, radius_sq, ridge), InputGeometry.ELLIPSOID, radius_sq)


def input_qc_ball(n: int, radius_sq: float) -> InputQc:
    """Norm-bounded set {x : ‖x‖² ≤ r}, P = [[−I, 0],[0, r]]."""
    if radius_sq <= 0:
        raise ValueError("radius_sq must be positive")
    P = np.zeros((n + 1, n + 1))
    P[:n, :n] = -np.eye(n)
    P[n, n] = radius_sq
    return InputQc(P, InputGeometry.ELLIPSOID, radius_sq)


def halfspace_margin(a: ArrayLike, b: float, ms: MomentSet, eps: RiskLevel | float) -> float:
    """Closed-form WC-CVaR_ε of aᵀx − b: aᵀμ + sqrt((1−ε)/ε)·sqrt(aᵀΣa) − b."""
    normal = np.asarray(a, dtype=float).ravel()
    level = as_risk_level(eps).epsilon
    spread = math.sqrt(max(float(normal @ ms.covariance @ normal), 0.0))
    return float(normal @ ms.mean) + math.sqrt((1.0 - level) / level) * spread - float(b)


def input_qc_halfspace(
    a: ArrayLike,
    b: float,
    ms: MomentSet,
    eps: RiskLevel | float,
    geometry: InputGeometry = InputGeometry.HYPERPLANE,
) -> InputQc:
    """Affine input QC aᵀx − b ≤ 0 lifted to [x;1], with its closed-form margin.

    Raises:
        ZeroNormal: If a is the zero vector.
        DimensionMismatch: If len(a) differs from the moment dimension.
    """
    normal = np.asarray(a, dtype=float).ravel()
    if normal.shape[0] != ms.dim:
        raise DimensionMismatch(f"normal has length {normal.shape[0]}, expected {ms.dim}")
    if not np.any(normal):
        raise ZeroNormal(f"face normal is zero (offset {b})")
    n = ms.dim
    P = np.zeros((n + 1, n + 1))
    P[:n, n] = -0.5 * normal
    P[n, :n] = -0.5 * normal
    P[n, n] = float(b)
    return InputQc(P, geometry, margin=halfspace_margin(normal, b, ms, eps))


def input_qc_polytope(
    faces: list[tuple[ArrayLike, float]], ms: MomentSet, eps: RiskLevel | float
) -> list[InputQc]:
    """One affine QC per face aᵀx ≤ b; the polytope is admissible iff every face is."""
    if not faces:
        raise EmptyInput("polytope needs at least one face")
    return [
        input_qc_halfspace(a, b, ms, eps, geometry=InputGeometry.POLYTOPE_FACE) for a, b in faces
    ]
