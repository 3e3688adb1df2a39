"""Moment ambiguity sets, quadratic losses and risk levels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from riskverify.errors import (
    DimensionMismatch,
    InvalidCovariance,
    InvalidRiskLevel,
    SingularCovariance,
)

# Eigenvalues above -PSD_CLIP are clipped to zero; below it the covariance is rejected.
PSD_CLIP = 1e-10

FloatArray = NDArray[np.float64]


def symmetrize(matrix: ArrayLike) -> FloatArray:
    """Return (M + Mᵀ)/2 as a float array."""
    m = np.asarray(matrix, dtype=float)
    return 0.5 * (m + m.T)


@dataclass(frozen=True, eq=False)
class RiskLevel:
    """A risk level ε in the open interval (0, 1)."""

    epsilon: float

    def __post_init__(self) -> None:
        eps = float(self.epsilon)
        if not 0.0 < eps < 1.0:
            raise InvalidRiskLevel(f"risk level must be in (0,1), got {self.epsilon}")
        object.__setattr__(self, "epsilon", eps)

    def __float__(self) -> float:
        return self.epsilon

    def __repr__(self) -> str:
        return f"RiskLevel({self.epsilon!r})"


@dataclass(frozen=True, eq=False)
class MomentSet:
    """The ambiguity set of all distributions with a given mean and covariance."""

    mean: FloatArray
    covariance: FloatArray

    def __post_init__(self) -> None:
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float)).ravel()
        cov = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        n = mean.shape[0]
        if cov.shape != (n, n):
            raise DimensionMismatch(
                f"covariance shape {cov.shape} does not match mean length {n}"
            )
        cov = symmetrize(cov)
        eigvals, eigvecs = np.linalg.eigh(cov)
        if eigvals.min() < -PSD_CLIP:
            raise InvalidCovariance(
                f"covariance is not positive semidefinite (min eigenvalue {eigvals.min():.3e})"
            )
        if eigvals.min() < 0.0:
            cov = symmetrize((eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        """Dimension n of the random vector."""
        return int(self.mean.shape[0])

    def regularized_covariance(self, ridge: float = PSD_CLIP) -> FloatArray:
        """Covariance with a ridge added when it is numerically singular."""
        if np.linalg.eigvalsh(self.covariance).min() < ridge:
            return self.covariance + ridge * np.eye(self.dim)
        return np.array(self.covariance)

    def inverse_covariance(self, ridge: float = PSD_CLIP) -> FloatArray:
        """Σ⁻¹, after ridge regularization of a near-singular Σ."""
        cov = self.regularized_covariance(ridge)
        try:
            return symmetrize(np.linalg.inv(cov))
        except np.linalg.LinAlgError as e:
            raise SingularCovariance(f"covariance cannot be inverted: {e}") from e

    def sqrt_covariance(self) -> FloatArray:
        """Symmetric square root Σ^{1/2}."""
        eigvals, eigvecs = np.linalg.eigh(self.covariance)
        return symmetrize((eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T)

    def with_ridge(self, ridge: float) -> MomentSet:
        """Return a copy with ridge·I added to the covariance."""
        return MomentSet(self.mean, self.covariance + ridge * np.eye(self.dim))


@dataclass(frozen=True, eq=False)
class AugmentedMoment:
    """Second-order moment matrix Ω = E[[ξ;1][ξ;1]ᵀ]."""

    omega: FloatArray

    @property
    def dim(self) -> int:
        return int(self.omega.shape[0]) - 1


@dataclass(frozen=True, eq=False)
class QuadraticLoss:
    """The loss ξ ↦ ξᵀΠξ + 2θᵀξ + ρ; Π may be indefinite."""

    quad: FloatArray
    lin: FloatArray = field(default_factory=lambda: np.zeros(0))
    const: float = 0.0

    def __post_init__(self) -> None:
        quad = symmetrize(np.atleast_2d(np.asarray(self.quad, dtype=float)))
        n = quad.shape[0]
        if quad.shape != (n, n):
            raise DimensionMismatch(f"quadratic block must be square, got {quad.shape}")
        lin = np.asarray(self.lin, dtype=float).ravel()
        if lin.size == 0:
            lin = np.zeros(n)
        if lin.shape != (n,):
            raise DimensionMismatch(f"linear term length {lin.shape[0]} does not match {n}")
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "const", float(self.const))

    @classmethod
    def from_matrix(cls, H: ArrayLike) -> QuadraticLoss:
        """Split a lifted (n+1)×(n+1) matrix H into (Π, θ, ρ) with loss [ξ;1]ᵀH[ξ;1]."""
        h = symmetrize(H)
        return cls(h[:-1, :-1], h[:-1, -1], float(h[-1, -1]))

    @classmethod
    def constant(cls, n: int, value: float) -> QuadraticLoss:
        return cls(np.zeros((n, n)), np.zeros(n), value)

    @property
    def dim(self) -> int:
        return int(self.quad.shape[0])

    def to_matrix(self) -> FloatArray:
        """Lifted matrix [[Π, θ],[θᵀ, ρ]]."""
        n = self.dim
        h = np.zeros((n + 1, n + 1))
        h[:n, :n] = self.quad
        h[:n, n] = self.lin
        h[n, :n] = self.lin
        h[n, n] = self.const
        return h

    def evaluate(self, samples: ArrayLike) -> FloatArray:
        """Evaluate the loss row-wise on an (N, n) sample matrix."""
        x = np.atleast_2d(np.asarray(samples, dtype=float))
        if x.shape[1] != self.dim:
            raise DimensionMismatch(f"samples have {x.shape[1]} columns, loss expects {self.dim}")
        return np.einsum("ij,jk,ik->i", x, self.quad, x) + 2.0 * x @ self.lin + self.const

    def __add__(self, other: QuadraticLoss) -> QuadraticLoss:
        return QuadraticLoss(self.quad + other.quad, self.lin + other.lin, self.const + other.const)

    def scaled(self, factor: float) -> QuadraticLoss:
        return QuadraticLoss(factor * self.quad, factor * self.lin, factor * self.const)

    def shifted(self, offset: float) -> QuadraticLoss:
        return QuadraticLoss(self.quad, self.lin, self.const + offset)


def build_omega(ms: MomentSet) -> AugmentedMoment:
    """Assemble Ω = [[Σ + μμᵀ, μ],[μᵀ, 1]]."""
    n = ms.dim
    omega = np.empty((n + 1, n + 1))
    omega[:n, :n] = ms.covariance + np.outer(ms.mean, ms.mean)
    omega[:n, n] = ms.mean
    omega[n, :n] = ms.mean
    omega[n, n] = 1.0
    return AugmentedMoment(symmetrize(omega))
