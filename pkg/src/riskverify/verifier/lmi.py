"""Lifted LMI blocks M_in, M_mid and M_out on 𝐱̄ = [x⁰; …; x^ℓ; 1]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from riskverify.errors import DimensionMismatch
from riskverify.network.model import CompactForm, Network, lifted_trajectories
from riskverify.qc.activation import ActivationQc
from riskverify.qc.input import InputQc
from riskverify.qc.safety import SafetyQc
from riskverify.risk.moments import FloatArray, symmetrize


@dataclass(frozen=True, eq=False)
class LiftMatrices:
    """Maps from 𝐱̄ to [x;1], [z; φ(z); 1] and [x; f(x); 1]."""

    input_lift: FloatArray
    mid_lift: FloatArray
    output_lift: FloatArray

    @property
    def lifted_dim(self) -> int:
        return int(self.input_lift.shape[1])


def lift_matrices(cf: CompactForm) -> LiftMatrices:
    """[[E⁰,0],[0,1]], [[𝐀,𝐛],[𝐁,0],[0,1]] and [[E⁰,0],[W^ℓE^ℓ,b^ℓ],[0,1]]."""
    nbar = cf.lifted_dim
    total = nbar - 1
    d = cf.hidden_dim
    n = cf.input_dim
    m = cf.output_dim
    e0 = cf.selectors[0]
    e_last = cf.selectors[-1]

    input_lift = np.zeros((n + 1, nbar))
    input_lift[:n, :total] = e0
    input_lift[n, total] = 1.0

    mid_lift = np.zeros((2 * d + 1, nbar))
    mid_lift[:d, :total] = cf.big_a
    mid_lift[:d, total] = cf.big_b_vec
    mid_lift[d:2 * d, :total] = cf.big_b
    mid_lift[2 * d, total] = 1.0

    output_lift = np.zeros((n + m + 1, nbar))
    output_lift[:n, :total] = e0
    output_lift[n:n + m, :total] = cf.out_weights @ e_last
    output_lift[n:n + m, total] = cf.out_bias
    output_lift[n + m, total] = 1.0
    return LiftMatrices(input_lift, mid_lift, output_lift)


@dataclass(frozen=True, eq=False)
class LiftedLmi:
    """The three n̄×n̄ terms whose sum must be negative semidefinite."""

    M_in: FloatArray
    M_mid: FloatArray
    M_out: FloatArray

    @property
    def lifted_dim(self) -> int:
        return int(self.M_in.shape[0])

    @property
    def total(self) -> FloatArray:
        return symmetrize(self.M_in + self.M_mid + self.M_out)

    @property
    def slack(self) -> float:
        """λ_min(−(M_in + M_mid + M_out)); nonnegative when the LMI holds."""
        return float(np.linalg.eigvalsh(-self.total).min())

    def terms(self, lifted: ArrayLike) -> dict[str, FloatArray]:
        """Per-row quadratic forms 𝐱̄ᵀM𝐱̄ of each block on an (N, n̄) batch."""
        points = np.atleast_2d(np.asarray(lifted, dtype=float))
        if points.shape[1] != self.lifted_dim:
            raise DimensionMismatch(
                f"lifted points have {points.shape[1]} columns, expected {self.lifted_dim}"
            )
        return {
            name: np.einsum("ij,jk,ik->i", points, matrix, points)
            for name, matrix in (("in", self.M_in), ("mid", self.M_mid), ("out", self.M_out))
        }


def lifted_points(net: Network, x: ArrayLike) -> FloatArray:
    """Trajectories with the trailing 1 appended, shape (N, n̄)."""
    traj = lifted_trajectories(net, x)
    return np.hstack([traj, np.ones((traj.shape[0], 1))])


def _matrix(value: InputQc | ActivationQc | SafetyQc | ArrayLike) -> FloatArray:
    if isinstance(value, InputQc):
        return value.P
    if isinstance(value, ActivationQc):
        return value.Q
    if isinstance(value, SafetyQc):
        return value.S
    return symmetrize(value)


def _check(block: str, matrix: FloatArray, size: int) -> None:
    if matrix.shape != (size, size):
        rows, cols = matrix.shape
        raise DimensionMismatch(f"{block} is {rows}x{cols}, expected {size}x{size}")


def assemble(
    cf: CompactForm,
    P: InputQc | ArrayLike,
    Q: ActivationQc | ArrayLike,
    S: SafetyQc | ArrayLike,
) -> LiftedLmi:
    """Lift P, Q and S into the n̄×n̄ blocks of the verification LMI.

    Raises:
        DimensionMismatch: Naming the block (P, Q or S) whose size does not fit the network.
    """
    lifts = lift_matrices(cf)
    P_mat, Q_mat, S_mat = _matrix(P), _matrix(Q), _matrix(S)
    _check("P (input block)", P_mat, lifts.input_lift.shape[0])
    _check("Q (activation block)", Q_mat, lifts.mid_lift.shape[0])
    _check("S (output block)", S_mat, lifts.output_lift.shape[0])
    return LiftedLmi(
        M_in=symmetrize(lifts.input_lift.T @ P_mat @ lifts.input_lift),
        M_mid=symmetrize(lifts.mid_lift.T @ Q_mat @ lifts.mid_lift),
        M_out=symmetrize(lifts.output_lift.T @ S_mat @ lifts.output_lift),
    )
