"""Conic-program contract shared by every PSD and log-det solve.

A :class:`ConicProgram` collects decision variables, affine equalities and
PSD-cone memberships, then solves once and reports status, objective and
residuals. Each program builds its own ``cvxpy.Problem``; nothing is shared
between solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any

import cvxpy as cp
import numpy as np

from riskverify.errors import SolverError
from riskverify.logging import get_logger
from riskverify.metrics import get_metrics

if TYPE_CHECKING:
    from riskverify.config import Config


class SolveStatus(str, Enum):
    """Outcome of a conic solve."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_LIMIT = "numerical_limit"


_STATUS_MAP = {
    cp.OPTIMAL: SolveStatus.OPTIMAL,
    cp.OPTIMAL_INACCURATE: SolveStatus.NUMERICAL_LIMIT,
    cp.INFEASIBLE: SolveStatus.INFEASIBLE,
    cp.INFEASIBLE_INACCURATE: SolveStatus.INFEASIBLE,
    cp.UNBOUNDED: SolveStatus.UNBOUNDED,
    cp.UNBOUNDED_INACCURATE: SolveStatus.UNBOUNDED,
}


@dataclass(frozen=True)
class SolverReport:
    """Status, objective and residuals of one solve.

    ``objective`` is only meaningful when ``usable`` is true.
    """

    program: str
    status: SolveStatus
    objective: float
    primal_residual: float
    dual_residual: float
    solver: str
    raw_status: str
    solve_seconds: float
    accepted_inaccurate: bool = False

    @property
    def usable(self) -> bool:
        return self.status is SolveStatus.OPTIMAL or self.accepted_inaccurate

    def to_dict(self) -> dict[str, Any]:
        return {
            "program": self.program,
            "status": self.status.value,
            "objective": self.objective,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "solver": self.solver,
            "raw_status": self.raw_status,
        }


def _solver_options(name: str, tolerance: float) -> dict[str, Any]:
    if name == "CLARABEL":
        return {"tol_gap_abs": tolerance, "tol_gap_rel": tolerance, "tol_feas": tolerance}
    if name == "SCS":
        eps = max(tolerance, 1e-9)
        return {"eps_abs": eps, "eps_rel": eps, "max_iters": 200_000}
    return {}


class ConicProgram:
    """Builder for a single linear/log-det objective program over PSD cones.

    Args:
        name: Program name used in logs and metrics labels.
        config: Solver settings.
    """

    def __init__(self, name: str, config: Config) -> None:
        self.name = name
        self.config = config
        self.constraints: list[cp.Constraint] = []
        self._psd: list[cp.Constraint] = []
        self._objective: cp.Minimize | cp.Maximize | None = None
        self.logger = get_logger("risk.solver")
        metrics = get_metrics()
        self._solves = metrics.counter("solves_total", "Conic solves by program and status")
        self._timer = metrics.histogram("solve_seconds", "Wall-clock seconds per conic solve")

    def free(self, shape: int | tuple[int, ...] = (), name: str | None = None) -> cp.Variable:
        return cp.Variable(shape, name=name)

    def nonneg(self, shape: int | tuple[int, ...] = (), name: str | None = None) -> cp.Variable:
        return cp.Variable(shape, nonneg=True, name=name)

    def symmetric(self, size: int, name: str | None = None, psd: bool = False) -> cp.Variable:
        if psd:
            return cp.Variable((size, size), PSD=True, name=name)
        return cp.Variable((size, size), symmetric=True, name=name)

    def add_psd(self, expr: cp.Expression) -> None:
        """Constrain expr ⪰ 0; the expression is symmetrized first."""
        constraint = 0.5 * (expr + expr.T) >> 0
        self.constraints.append(constraint)
        self._psd.append(constraint)

    def add_nsd(self, expr: cp.Expression) -> None:
        """Constrain expr ⪯ 0."""
        self.add_psd(-expr)

    def add_equality(self, lhs: cp.Expression, rhs: Any) -> None:
        self.constraints.append(lhs == rhs)

    def add_constraint(self, constraint: cp.Constraint) -> None:
        self.constraints.append(constraint)

    def minimize(self, objective: cp.Expression) -> None:
        self._objective = cp.Minimize(objective)

    def maximize(self, objective: cp.Expression) -> None:
        self._objective = cp.Maximize(objective)

    def solve(self) -> SolverReport:
        """Solve the program with the configured solver, falling back once on failure.

        Returns:
            SolverReport describing the outcome.

        Raises:
            SolverError: If no solver could process the program.
        """
        if self._objective is None:
            raise SolverError(f"{self.name}: no objective set")
        problem = cp.Problem(self._objective, self.constraints)
        candidates = [self.config.solver.upper()]
        if self.config.solver_fallback and self.config.solver_fallback.upper() not in candidates:
            candidates.append(self.config.solver_fallback.upper())

        last_error: Exception | None = None
        for solver in candidates:
            try:
                with self._timer.labels(program=self.name).time():
                    problem.solve(
                        solver=solver,
                        **_solver_options(solver, self.config.solver_tolerance),
                    )
            except (cp.SolverError, ValueError) as e:
                last_error = e
                self.logger.warning(
                    "Solver failed",
                    extra={"program": self.name, "solver": solver, "error": str(e)},
                )
                continue
            report = self._report(problem, solver)
            self._solves.labels(program=self.name, status=report.status.value).inc()
            self.logger.debug(
                "Conic solve finished",
                extra={
                    "program": self.name,
                    "solver": solver,
                    "status": report.raw_status,
                    "objective": report.objective,
                    "seconds": report.solve_seconds,
                },
            )
            return report

        self._solves.labels(program=self.name, status="error").inc()
        raise SolverError(f"{self.name}: all solvers failed ({last_error})")

    def _report(self, problem: cp.Problem, solver: str) -> SolverReport:
        raw = str(problem.status)
        status = _STATUS_MAP.get(raw, SolveStatus.NUMERICAL_LIMIT)
        accepted = False
        if status is SolveStatus.NUMERICAL_LIMIT and problem.value is not None:
            accepted = self.config.accept_inaccurate and bool(np.isfinite(problem.value))
            self.logger.warning(
                "Solver returned an inaccurate solution",
                extra={"program": self.name, "solver": solver, "accepted": accepted},
            )
        objective = float(problem.value) if problem.value is not None else float("nan")
        stats = problem.solver_stats
        seconds = float(stats.solve_time) if stats and stats.solve_time is not None else 0.0
        return SolverReport(
            program=self.name,
            status=status,
            objective=objective,
            primal_residual=self._primal_residual(),
            dual_residual=self._dual_residual(),
            solver=solver,
            raw_status=raw,
            solve_seconds=seconds,
            accepted_inaccurate=accepted,
        )

    def _primal_residual(self) -> float:
        worst = 0.0
        for constraint in self.constraints:
            try:
                violation = constraint.violation()
            except (ValueError, TypeError):
                continue
            if violation is None:
                continue
            worst = max(worst, float(np.max(np.abs(np.atleast_1d(violation)))))
        return worst

    def _dual_residual(self) -> float:
        worst = 0.0
        for constraint in self._psd:
            dual = constraint.dual_value
            if dual is None:
                continue
            dual = np.atleast_2d(np.asarray(dual, dtype=float))
            worst = max(worst, -float(np.linalg.eigvalsh(0.5 * (dual + dual.T)).min()))
        return worst
