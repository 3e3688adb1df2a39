"""Output (safety) QCs on [x; f(x); 1].

Safety means WC-CVaR_ε([x; f(x); 1]ᵀS[x; f(x); 1]) ≤ 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from riskverify.errors import (
    DimensionMismatch,
    InvalidClassIndex,
    NegativeMultiplier,
    SingularShape,
)
from riskverify.risk.moments import FloatArray, symmetrize


class SafetyProvenance(str, Enum):
    ELLIPSOID = "ellipsoid"
    POLYTOPE_MARGIN = "polytope-margin"
    CLASSIFICATION = "classification"
    CUSTOM = "custom"


class ClassificationMode(str, Enum):
    PER_HYPERPLANE = "per_hyperplane"
    COUPLED = "coupled"


@dataclass(frozen=True, eq=False)
class SafetyQc:
    """S of size (n+m+1) with its provenance."""

    S: FloatArray
    input_dim: int
    provenance: SafetyProvenance
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        S = symmetrize(self.S)
        if S.shape[0] <= self.input_dim + 1:
            raise DimensionMismatch(f"S of size {S.shape[0]} leaves no output block")
        object.__setattr__(self, "S", S)

    @property
    def output_dim(self) -> int:
        return int(self.S.shape[0]) - self.input_dim - 1

    def evaluate(self, x: ArrayLike, f: ArrayLike) -> FloatArray:
        """[x; f; 1]ᵀS[x; f; 1] per row."""
        xb = np.atleast_2d(np.asarray(x, dtype=float))
        fb = np.atleast_2d(np.asarray(f, dtype=float))
        if xb.shape[1] != self.input_dim or fb.shape[1] != self.output_dim:
            raise DimensionMismatch(
                f"expected x with {self.input_dim} and f with {self.output_dim} columns"
            )
        v = np.hstack([xb, fb, np.ones((xb.shape[0], 1))])
        return np.einsum("ij,jk,ik->i", v, self.S, v)


def _check_shape(E: ArrayLike) -> FloatArray:
    shape = symmetrize(E)
    try:
        np.linalg.cholesky(shape)
    except np.linalg.LinAlgError as e:
        raise SingularShape("ellipsoid shape matrix must be positive definite") from e
    return shape


def safety_qc_ellipsoid(E: ArrayLike, C: ArrayLike, input_dim: int) -> SafetyQc:
    """S(E) = [[CᵀE⁻¹C, 0],[0, −1]]: the form equals yᵀE⁻¹y − 1 with y = C[x; f].

    Raises:
        SingularShape: If E is not positive definite.
        DimensionMismatch: If C does not map [x; f] onto E's space.
    """
    shape = _check_shape(E)
    out_map = np.atleast_2d(np.asarray(C, dtype=float))
    if out_map.shape[0] != shape.shape[0]:
        raise DimensionMismatch(f"C has {out_map.shape[0]} rows, E is {shape.shape[0]}-dimensional")
    width = out_map.shape[1]
    S = np.zeros((width + 1, width + 1))
    S[:width, :width] = out_map.T @ np.linalg.inv(shape) @ out_map
    S[width, width] = -1.0
    return SafetyQc(S, input_dim, SafetyProvenance.ELLIPSOID, {"shape": shape.tolist()})


def safety_qc_output_halfspace(
    a: ArrayLike, b: float, C: ArrayLike, input_dim: int
) -> SafetyQc:
    """Affine output constraint aᵀy − b ≤ 0 with y = C[x; f]."""
    normal = np.asarray(a, dtype=float).ravel()
    out_map = np.atleast_2d(np.asarray(C, dtype=float))
    if out_map.shape[0] != normal.shape[0]:
        raise DimensionMismatch(f"C has {out_map.shape[0]} rows, normal has {normal.shape[0]}")
    width = out_map.shape[1]
    lin = out_map.T @ normal
    S = np.zeros((width + 1, width + 1))
    S[:width, width] = 0.5 * lin
    S[width, :width] = 0.5 * lin
    S[width, width] = -float(b)
    return SafetyQc(S, input_dim, SafetyProvenance.POLYTOPE_MARGIN, {"offset": float(b)})


def safety_qc_constant(input_dim: int, output_dim: int, value: float) -> SafetyQc:
    """Constant loss; −1 is trivially safe and +1 trivially unsafe."""
    size = input_dim + output_dim + 1
    S = np.zeros((size, size))
    S[-1, -1] = float(value)
    return SafetyQc(S, input_dim, SafetyProvenance.CUSTOM, {"constant": float(value)})


def output_selector(input_dim: int, output_dim: int) -> FloatArray:
    """C = [0 | I_m], selecting f from [x; f]."""
    return np.hstack([np.zeros((output_dim, input_dim)), np.eye(output_dim)])


def _check_class(c: int, m: int) -> None:
    if m < 2:
        raise InvalidClassIndex(f"need at least two classes, got {m}")
    if not 0 <= c < m:
        raise InvalidClassIndex(f"class index {c} out of range for {m} classes")


def classification_sub_matrix(c: int, m: int) -> FloatArray:
    """m×m matrix whose row i ≠ c is e_c − e_i and whose row c is zero."""
    _check_class(c, m)
    sub = np.zeros((m, m))
    for i in range(m):
        if i != c:
            sub[i, c] = 1.0
            sub[i, i] = -1.0
    return sub


def coupled_gamma_pairs(c: int, m: int) -> list[tuple[int, int]]:
    """Off-diagonal Γ entries that reach the form (rows other than c)."""
    return list(combinations([i for i in range(m) if i != c], 2))


def coupled_classification_basis(c: int, m: int, input_dim: int) -> FloatArray:
    """One S matrix per Γ pair, so S(Γ) = Σ Γᵢⱼ·basis."""
    sub = classification_sub_matrix(c, m)
    size = input_dim + m + 1
    basis = []
    for i, j in coupled_gamma_pairs(c, m):
        gamma = np.zeros((m, m))
        gamma[i, j] = gamma[j, i] = 1.0
        S = np.zeros((size, size))
        S[input_dim:input_dim + m, input_dim:input_dim + m] = sub.T @ gamma @ sub
        basis.append(S)
    return np.stack(basis) if basis else np.zeros((0, size, size))


def classification_qc(
    c: int,
    m: int,
    input_dim: int,
    mode: ClassificationMode | str = ClassificationMode.PER_HYPERPLANE,
    gamma: ArrayLike | None = None,
) -> list[SafetyQc] | SafetyQc:
    """Safety QCs for "class c wins".

    Per-hyperplane mode returns m − 1 matrices, one per competitor i, each
    encoding the margin loss f_i − f_c. Coupled mode returns
    blockdiag(0, S_subᵀΓS_sub, 0) for a symmetric Γ ≥ 0 with zero diagonal
    (default: all ones off the diagonal).

    Raises:
        InvalidClassIndex: If c is out of range or m < 2.
    """
    _check_class(c, m)
    mode = ClassificationMode(mode)
    size = input_dim + m + 1

    if mode is ClassificationMode.PER_HYPERPLANE:
        specs = []
        for i in range(m):
            if i == c:
                continue
            lin = np.zeros(m)
            lin[i], lin[c] = 1.0, -1.0
            S = np.zeros((size, size))
            S[input_dim:input_dim + m, -1] = 0.5 * lin
            S[-1, input_dim:input_dim + m] = 0.5 * lin
            specs.append(
                SafetyQc(S, input_dim, SafetyProvenance.CLASSIFICATION, {"class": c, "rival": i})
            )
        return specs

    g = np.ones((m, m)) - np.eye(m) if gamma is None else symmetrize(gamma)
    if g.shape != (m, m):
        raise DimensionMismatch(f"gamma must be {m}x{m}")
    if g.min() < 0.0:
        raise NegativeMultiplier("gamma entries must be nonnegative")
    np.fill_diagonal(g, 0.0)
    sub = classification_sub_matrix(c, m)
    S = np.zeros((size, size))
    S[input_dim:input_dim + m, input_dim:input_dim + m] = sub.T @ g @ sub
    return SafetyQc(
        S,
        input_dim,
        SafetyProvenance.CLASSIFICATION,
        {"class": c, "coupled": True, "gamma": g.tolist(), "sub": sub.tolist()},
    )
