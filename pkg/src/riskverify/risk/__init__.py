"""Moment ambiguity sets and worst-case CVaR."""

from riskverify.risk.cvar import (
    CoherenceReport,
    WcCvarSolution,
    as_risk_level,
    bootstrap_cvar_stderr,
    coherence_checks,
    empirical_cvar,
    solve_wc_cvar,
    wc_cvar_quadratic,
    wc_cvar_quadratic_sign,
)
from riskverify.risk.moments import (
    AugmentedMoment,
    MomentSet,
    QuadraticLoss,
    RiskLevel,
    build_omega,
    symmetrize,
)
from riskverify.risk.solver import ConicProgram, SolverReport, SolveStatus

__all__ = [
    "AugmentedMoment",
    "CoherenceReport",
    "ConicProgram",
    "MomentSet",
    "QuadraticLoss",
    "RiskLevel",
    "SolveStatus",
    "SolverReport",
    "WcCvarSolution",
    "as_risk_level",
    "bootstrap_cvar_stderr",
    "build_omega",
    "coherence_checks",
    "empirical_cvar",
    "solve_wc_cvar",
    "symmetrize",
    "wc_cvar_quadratic",
    "wc_cvar_quadratic_sign",
]
