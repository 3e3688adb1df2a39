"""ReLU activation QCs.

Q acts on [z; φ(z); 1] with blocks Q₁₁ = 0, Q₁₂ = T, Q₁₃ = −ν, Q₂₂ = −2T,
Q₂₃ = ν + η, Q₃₃ = 0 and T = Σλᵢeᵢeᵢᵀ + Σλᵢⱼ(eᵢ − eⱼ)(eᵢ − eⱼ)ᵀ.
Every Q is a linear combination of a fixed basis, one matrix per multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from numpy.typing import ArrayLike

from riskverify.errors import DimensionMismatch, NegativeMultiplier
from riskverify.network.model import relu
from riskverify.risk.moments import FloatArray

# Solver output below zero by at most this much is clipped to zero.
SIGN_TOLERANCE = 1e-9


def pair_indices(d: int) -> list[tuple[int, int]]:
    return list(combinations(range(d), 2))


@dataclass(frozen=True, eq=False)
class ReluMultipliers:
    """Multipliers λ (free), λᵢⱼ ≥ 0 (upper triangle), ν ≥ 0, η ≥ 0."""

    lam: FloatArray
    nu: FloatArray
    eta: FloatArray
    lam_pair: FloatArray | None = None

    def __post_init__(self) -> None:
        lam = np.asarray(self.lam, dtype=float).ravel()
        d = lam.shape[0]
        nu = np.asarray(self.nu, dtype=float).ravel()
        eta = np.asarray(self.eta, dtype=float).ravel()
        if nu.shape != (d,) or eta.shape != (d,):
            raise DimensionMismatch(f"nu and eta must have length {d}")
        pair = None
        if self.lam_pair is not None:
            pair = np.triu(np.asarray(self.lam_pair, dtype=float), k=1)
            if pair.shape != (d, d):
                raise DimensionMismatch(f"lam_pair must be {d}x{d}")
        for name, values in (("nu", nu), ("eta", eta), ("lam_pair", pair)):
            if values is not None and values.size and values.min() < 0.0:
                raise NegativeMultiplier(f"{name} has a negative entry ({values.min():.3e})")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "lam_pair", pair)

    @classmethod
    def zeros(cls, d: int, pairwise: bool = False) -> ReluMultipliers:
        return cls(np.zeros(d), np.zeros(d), np.zeros(d), np.zeros((d, d)) if pairwise else None)

    @classmethod
    def from_vector(cls, vector: ArrayLike, d: int, pairwise: bool) -> ReluMultipliers:
        """Inverse of :meth:`to_vector`; tiny negative solver noise is clipped."""
        v = np.asarray(vector, dtype=float).ravel()
        pairs = pair_indices(d) if pairwise else []
        if v.shape[0] != 3 * d + len(pairs):
            raise DimensionMismatch(f"expected {3 * d + len(pairs)} multipliers, got {v.shape[0]}")

        def clip(values: FloatArray, name: str) -> FloatArray:
            if values.size and values.min() < -SIGN_TOLERANCE:
                raise NegativeMultiplier(f"{name} has a negative entry ({values.min():.3e})")
            return np.clip(values, 0.0, None)

        lam = v[:d]
        pair_matrix = None
        if pairwise:
            pair_values = clip(v[d:d + len(pairs)], "lam_pair")
            pair_matrix = np.zeros((d, d))
            for value, (i, j) in zip(pair_values, pairs):
                pair_matrix[i, j] = value
        rest = v[d + len(pairs):]
        return cls(lam, clip(rest[:d], "nu"), clip(rest[d:], "eta"), pair_matrix)

    @property
    def dim(self) -> int:
        return int(self.lam.shape[0])

    @property
    def pairwise(self) -> bool:
        return self.lam_pair is not None

    def to_vector(self) -> FloatArray:
        """Coefficients in basis order: λ, λᵢⱼ (i < j), ν, η."""
        parts = [self.lam]
        if self.lam_pair is not None:
            parts.append(np.array([self.lam_pair[i, j] for i, j in pair_indices(self.dim)]))
        parts.extend([self.nu, self.eta])
        return np.concatenate(parts)

    def to_dict(self) -> dict[str, list[float] | list[list[float]] | None]:
        return {
            "lam": self.lam.tolist(),
            "lam_pair": None if self.lam_pair is None else self.lam_pair.tolist(),
            "nu": self.nu.tolist(),
            "eta": self.eta.tolist(),
        }


def relu_qc_basis(d: int, pairwise: bool = False) -> FloatArray:
    """Basis matrices (K, 2d+1, 2d+1) in the coefficient order of ReluMultipliers."""
    size = 2 * d + 1
    last = 2 * d
    basis: list[FloatArray] = []

    def t_block(T: FloatArray) -> FloatArray:
        Q = np.zeros((size, size))
        Q[:d, d:2 * d] = T
        Q[d:2 * d, :d] = T
        Q[d:2 * d, d:2 * d] = -2.0 * T
        return Q

    for i in range(d):
        T = np.zeros((d, d))
        T[i, i] = 1.0
        basis.append(t_block(T))
    if pairwise:
        for i, j in pair_indices(d):
            diff = np.zeros(d)
            diff[i], diff[j] = 1.0, -1.0
            basis.append(t_block(np.outer(diff, diff)))
    for i in range(d):
        Q = np.zeros((size, size))
        Q[i, last] = Q[last, i] = -1.0
        Q[d + i, last] = Q[last, d + i] = 1.0
        basis.append(Q)
    for i in range(d):
        Q = np.zeros((size, size))
        Q[d + i, last] = Q[last, d + i] = 1.0
        basis.append(Q)
    return np.stack(basis)


@dataclass(frozen=True, eq=False)
class ActivationQc:
    """Q with [z; φ(z); 1]ᵀQ[z; φ(z); 1] ≥ 0 for every z."""

    Q: FloatArray

    @property
    def dim(self) -> int:
        return (int(self.Q.shape[0]) - 1) // 2

    def evaluate(self, z: ArrayLike) -> FloatArray:
        """Quadratic form on rows of an (N, d) batch of pre-activations."""
        batch = np.atleast_2d(np.asarray(z, dtype=float))
        if batch.shape[1] != self.dim:
            raise DimensionMismatch(f"z has {batch.shape[1]} columns, expected {self.dim}")
        v = np.hstack([batch, relu(batch), np.ones((batch.shape[0], 1))])
        return np.einsum("ij,jk,ik->i", v, self.Q, v)


def relu_qc(mult: ReluMultipliers, d: int) -> ActivationQc:
    """Assemble Q from multipliers.

    Raises:
        DimensionMismatch: If the multipliers are not d-dimensional.
    """
    if mult.dim != d:
        raise DimensionMismatch(f"multipliers have dimension {mult.dim}, expected {d}")
    basis = relu_qc_basis(d, mult.pairwise)
    return ActivationQc(np.tensordot(mult.to_vector(), basis, axes=1))
