"""Worst-case and empirical conditional value-at-risk."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import cvxpy as cp
import numpy as np
from numpy.typing import ArrayLike

from riskverify.config import Config
from riskverify.errors import DimensionMismatch, EmptyInput, SolverError, UnboundedError
from riskverify.logging import get_logger
from riskverify.risk.moments import MomentSet, QuadraticLoss, RiskLevel, build_omega
from riskverify.risk.solver import ConicProgram, SolverReport, SolveStatus

logger = get_logger("risk.cvar")


def as_risk_level(eps: RiskLevel | float) -> RiskLevel:
    return eps if isinstance(eps, RiskLevel) else RiskLevel(eps)


@dataclass(frozen=True)
class WcCvarSolution:
    """Optimal value and β of the worst-case CVaR program."""

    value: float
    beta: float
    report: SolverReport

    def to_dict(self) -> dict[str, Any]:
        return {"value": self.value, "beta": self.beta, "solver": self.report.to_dict()}


def solve_wc_cvar(
    loss: QuadraticLoss,
    ms: MomentSet,
    eps: RiskLevel | float,
    config: Config | None = None,
) -> WcCvarSolution:
    """Worst-case CVaR of a quadratic loss over all distributions with moments ms.

    Solves min β + Tr(ΩN)/ε over β and N ⪰ 0 subject to
    N − [[Π, θ],[θᵀ, ρ − β]] ⪰ 0.

    Raises:
        DimensionMismatch: If the loss and moment set dimensions differ.
        UnboundedError: If the program is unbounded below.
        SolverError: If the solver fails.
    """
    config = config or Config()
    level = as_risk_level(eps)
    if loss.dim != ms.dim:
        raise DimensionMismatch(f"loss dimension {loss.dim} does not match moments {ms.dim}")
    n = ms.dim
    omega = build_omega(ms).omega

    program = ConicProgram("wc_cvar", config)
    beta = program.free(name="beta")
    N = program.symmetric(n + 1, name="N", psd=True)
    corner = np.zeros((n + 1, n + 1))
    corner[n, n] = 1.0
    program.add_psd(N - loss.to_matrix() + beta * corner)
    program.minimize(beta + cp.trace(omega @ N) / level.epsilon)
    report = program.solve()

    if report.status is SolveStatus.UNBOUNDED:
        raise UnboundedError("worst-case CVaR program is unbounded below")
    if not report.usable:
        raise SolverError(f"worst-case CVaR solve failed with status {report.raw_status}")
    return WcCvarSolution(value=report.objective, beta=float(beta.value), report=report)


def wc_cvar_quadratic(
    loss: QuadraticLoss,
    ms: MomentSet,
    eps: RiskLevel | float,
    config: Config | None = None,
) -> float:
    """Worst-case CVaR value of ``loss`` over the moment ambiguity set."""
    return solve_wc_cvar(loss, ms, eps, config).value


def wc_cvar_quadratic_sign(
    loss: QuadraticLoss,
    ms: MomentSet,
    eps: RiskLevel | float,
    config: Config | None = None,
) -> bool:
    """Risk-aware QC membership: true iff the worst-case CVaR is at most tol_feas."""
    config = config or Config()
    value = wc_cvar_quadratic(loss, ms, eps, config)
    logger.debug("Risk-aware QC test", extra={"value": value, "tol_feas": config.tol_feas})
    return value <= config.tol_feas


def empirical_cvar(samples: ArrayLike, eps: RiskLevel | float) -> float:
    """Exact CVaR of the empirical distribution of ``samples`` (upper tail).

    Minimizes β + Σ(sᵢ − β)⁺/(εN) in closed form: the mean of the ⌊εN⌋
    largest samples plus the fractional weight on the next one.

    Raises:
        EmptyInput: If no samples are given.
    """
    values = np.asarray(samples, dtype=float).ravel()
    if values.size == 0:
        raise EmptyInput("empirical CVaR needs at least one sample")
    level = as_risk_level(eps).epsilon
    count = values.size
    tail_mass = level * count
    whole = min(int(np.floor(tail_mass)), count - 1)
    fraction = tail_mass - whole
    pivot = count - whole - 1
    part = np.partition(values, pivot)
    top = float(part[pivot + 1:].sum()) if whole > 0 else 0.0
    return (top + fraction * float(part[pivot])) / tail_mass


def bootstrap_cvar_stderr(
    samples: ArrayLike,
    eps: RiskLevel | float,
    resamples: int = 200,
    rng: np.random.Generator | None = None,
) -> float:
    """Bootstrap standard error of :func:`empirical_cvar`."""
    values = np.asarray(samples, dtype=float).ravel()
    if values.size == 0:
        raise EmptyInput("bootstrap needs at least one sample")
    rng = rng or np.random.default_rng(0)
    estimates = np.empty(resamples)
    for i in range(resamples):
        estimates[i] = empirical_cvar(values[rng.integers(0, values.size, values.size)], eps)
    return float(estimates.std(ddof=1)) if resamples > 1 else 0.0


@dataclass(frozen=True)
class CoherenceReport:
    """Worst-case CVaR values under shift, scaling and domination of a loss."""

    base: float
    shift: float
    shifted: float
    scale: float
    scaled: float
    dominated: float

    @property
    def translation_error(self) -> float:
        return abs(self.shifted - (self.base + self.shift))

    @property
    def homogeneity_error(self) -> float:
        return abs(self.scaled - self.scale * self.base)

    @property
    def monotonicity_gap(self) -> float:
        """How far value(L + D) falls below value(L); zero when monotone."""
        return max(0.0, self.base - self.dominated)

    def passed(self, tol: float = 1e-5, monotone_tol: float = 1e-7) -> bool:
        return (
            self.translation_error <= tol
            and self.homogeneity_error <= tol
            and self.monotonicity_gap <= monotone_tol
        )


def coherence_checks(
    loss: QuadraticLoss,
    ms: MomentSet,
    eps: RiskLevel | float,
    config: Config | None = None,
    shift: float = 5.0,
    scale: float = 2.0,
    dominating: QuadraticLoss | None = None,
) -> CoherenceReport:
    """Evaluate translation covariance, positive homogeneity and monotonicity.

    Args:
        dominating: Nonnegative loss D added for the monotonicity check;
            defaults to ξᵀξ.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    dominating = dominating or QuadraticLoss(np.eye(ms.dim))
    if np.linalg.eigvalsh(dominating.to_matrix()).min() < -1e-12:
        raise ValueError("dominating loss must be a PSD quadratic form (nonnegative)")
    base = wc_cvar_quadratic(loss, ms, eps, config)
    return CoherenceReport(
        base=base,
        shift=shift,
        shifted=wc_cvar_quadratic(loss.shifted(shift), ms, eps, config),
        scale=scale,
        scaled=wc_cvar_quadratic(loss.scaled(scale), ms, eps, config),
        dominated=wc_cvar_quadratic(loss + dominating, ms, eps, config),
    )
