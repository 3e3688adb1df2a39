"""Verification outcomes: certificates and certified ellipsoidal safe sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from riskverify.errors import DimensionMismatch, SingularShape
from riskverify.qc.activation import ReluMultipliers
from riskverify.risk.moments import FloatArray, symmetrize
from riskverify.risk.solver import SolverReport
from riskverify.verifier.lmi import LiftedLmi


class CertificateStatus(str, Enum):
    """Certified, or Undetermined when the sufficient condition could not be met."""

    CERTIFIED = "certified"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True, eq=False)
class Certificate:
    """Result of one LMI solve.

    Attributes:
        slack: λ_min(−(M_in + M_mid + M_out)) at the returned multipliers.
        t: Optimal LMI shift; the LMI holds with margin −t.
        input_scale: Multiplier τ ≥ 0 applied to each input QC.
        unbounded: The output is not contained in any ellipsoid under the input set.
    """

    status: CertificateStatus
    multipliers: ReluMultipliers | None = None
    input_scale: tuple[float, ...] = ()
    slack: float = float("nan")
    t: float = float("nan")
    epsilon: float | None = None
    report: SolverReport | None = None
    lmi: LiftedLmi | None = None
    unbounded: bool = False
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return self.status is CertificateStatus.CERTIFIED

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "epsilon": self.epsilon,
            "slack": None if math.isnan(self.slack) else self.slack,
            "t": None if math.isnan(self.t) else self.t,
            "input_scale": list(self.input_scale),
            "multipliers": None if self.multipliers is None else self.multipliers.to_dict(),
            "multiplier_vector": (
                None if self.multipliers is None else self.multipliers.to_vector().tolist()
            ),
            "solver": None if self.report is None else self.report.to_dict(),
            "unbounded": self.unbounded,
            **self.details,
        }


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Origin-centred ellipsoid {y : yᵀE⁻¹y ≤ 1}."""

    shape: FloatArray

    def __post_init__(self) -> None:
        shape = symmetrize(self.shape)
        try:
            np.linalg.cholesky(shape)
        except np.linalg.LinAlgError as e:
            raise SingularShape("ellipsoid shape matrix must be positive definite") from e
        shape.setflags(write=False)
        object.__setattr__(self, "shape", shape)

    @property
    def dim(self) -> int:
        return int(self.shape.shape[0])

    @property
    def inverse(self) -> FloatArray:
        return symmetrize(np.linalg.inv(self.shape))

    @property
    def log_det(self) -> float:
        """log det E, which equals −log det(E⁻¹), the volume proxy."""
        return float(np.linalg.slogdet(self.shape)[1])

    def eigendecomposition(self) -> tuple[FloatArray, FloatArray]:
        """Eigenvalues (ascending) and eigenvectors (columns); semi-axes are sqrt(eigenvalues)."""
        values, vectors = np.linalg.eigh(self.shape)
        return values, vectors

    def quadratic(self, y: ArrayLike) -> FloatArray:
        """yᵀE⁻¹y − 1 per row; nonpositive inside."""
        points = np.atleast_2d(np.asarray(y, dtype=float))
        if points.shape[1] != self.dim:
            raise DimensionMismatch(f"points have {points.shape[1]} columns, expected {self.dim}")
        return np.einsum("ij,jk,ik->i", points, self.inverse, points) - 1.0

    def contains(self, y: ArrayLike) -> FloatArray:
        return self.quadratic(y) <= 0.0

    def boundary_points(self, count: int = 360) -> FloatArray:
        """``count`` points on the boundary of a 2-D ellipsoid, shape (count, 2)."""
        if self.dim != 2:
            raise DimensionMismatch(f"boundary points need a 2-D ellipsoid, got {self.dim}-D")
        angles = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        circle = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        values, vectors = self.eigendecomposition()
        return circle @ (vectors * np.sqrt(values)).T

    def to_dict(self) -> dict[str, Any]:
        values, vectors = self.eigendecomposition()
        return {
            "shape": self.shape.tolist(),
            "log_det": self.log_det,
            "eigenvalues": values.tolist(),
            "eigenvectors": vectors.tolist(),
        }


@dataclass(frozen=True, eq=False)
class ClassificationCertificate:
    """Certificates for "class c wins": one per rival, or one coupled solve."""

    class_index: int
    mode: str
    certificates: tuple[Certificate, ...]
    rivals: tuple[int, ...] = ()

    @property
    def certified(self) -> bool:
        return bool(self.certificates) and all(c.certified for c in self.certificates)

    @property
    def status(self) -> CertificateStatus:
        return CertificateStatus.CERTIFIED if self.certified else CertificateStatus.UNDETERMINED

    def to_dict(self) -> dict[str, Any]:
        return {
            "class": self.class_index,
            "mode": self.mode,
            "status": self.status.value,
            "rivals": list(self.rivals),
            "certificates": [c.to_dict() for c in self.certificates],
        }
