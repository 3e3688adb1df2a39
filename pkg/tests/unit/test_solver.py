"""Tests for the conic-program contract."""

from __future__ import annotations

import cvxpy as cp
import numpy as np
import pytest
from pytest_mock import MockerFixture

from riskverify.config import Config
from riskverify.errors import SolverError
from riskverify.metrics import get_metrics
from riskverify.risk import ConicProgram, SolveStatus


def _small_sdp(config: Config) -> ConicProgram:
    """min trace(X) subject to X ⪰ diag(1, 2)."""
    program = ConicProgram("toy", config)
    X = program.symmetric(2, name="X")
    program.add_psd(X - np.diag([1.0, 2.0]))
    program.minimize(cp.trace(X))
    return program


class TestConicProgram:
    """Tests for ConicProgram."""

    def test_optimal_solve(self, config: Config) -> None:
        """Test that a small SDP solves to optimality."""
        report = _small_sdp(config).solve()

        assert report.status is SolveStatus.OPTIMAL
        assert report.usable
        assert report.objective == pytest.approx(3.0, abs=1e-6)
        assert report.primal_residual <= 1e-6

    def test_infeasible(self, config: Config) -> None:
        """Test that contradictory constraints report infeasible."""
        program = ConicProgram("infeasible", config)
        x = program.nonneg(name="x")
        program.add_constraint(x <= -1.0)
        program.minimize(x)

        report = program.solve()
        assert report.status is SolveStatus.INFEASIBLE
        assert not report.usable

    def test_unbounded(self, config: Config) -> None:
        """Test that an unbounded objective is reported."""
        program = ConicProgram("unbounded", config)
        x = program.free(name="x")
        program.add_constraint(x <= 1.0)
        program.minimize(x)

        assert program.solve().status is SolveStatus.UNBOUNDED

    def test_requires_objective(self, config: Config) -> None:
        """Test that solving without an objective fails."""
        with pytest.raises(SolverError, match="no objective"):
            ConicProgram("empty", config).solve()

    def test_records_metrics(self, config: Config) -> None:
        """Test that a solve is counted and timed."""
        _small_sdp(config).solve()

        metrics = get_metrics()
        solves = metrics.counter("solves_total", "Conic solves by program and status")
        timer = metrics.histogram("solve_seconds", "Wall-clock seconds per conic solve")
        assert solves.labels(program="toy", status="optimal").value == 1
        assert len(timer.observations()["program=toy"]) == 1

    def test_report_dict_has_no_timing(self, config: Config) -> None:
        """Test that the serialized report stays free of wall-clock values."""
        data = _small_sdp(config).solve().to_dict()
        assert "solve_seconds" not in data
        assert data["status"] == "optimal"


class TestSolverFallback:
    """Tests for the fallback solver."""

    def test_falls_back_once(self, mocker: MockerFixture, config: Config) -> None:
        """Test that a failing primary solver hands over to the fallback."""
        original = cp.Problem.solve
        calls: list[str] = []

        def flaky(problem: cp.Problem, *args: object, **kwargs: object) -> object:
            calls.append(str(kwargs["solver"]))
            if kwargs["solver"] == "CLARABEL":
                raise cp.SolverError("primary down")
            return original(problem, *args, **kwargs)

        mocker.patch.object(cp.Problem, "solve", autospec=True, side_effect=flaky)
        report = _small_sdp(config).solve()

        assert calls == ["CLARABEL", "SCS"]
        assert report.solver == "SCS"
        assert report.objective == pytest.approx(3.0, abs=1e-4)

    def test_all_solvers_fail(self, mocker: MockerFixture) -> None:
        """Test that SolverError is raised when every solver fails."""
        mocker.patch.object(cp.Problem, "solve", side_effect=cp.SolverError("down"))

        with pytest.raises(SolverError, match="all solvers failed"):
            _small_sdp(Config()).solve()
        errors = get_metrics().counter("solves_total", "Conic solves by program and status")
        assert errors.labels(program="toy", status="error").value == 1

    def test_no_fallback_configured(self, mocker: MockerFixture) -> None:
        """Test that only the primary solver is tried without a fallback."""
        solve = mocker.patch.object(cp.Problem, "solve", side_effect=cp.SolverError("down"))

        with pytest.raises(SolverError):
            _small_sdp(Config(solver_fallback=None)).solve()
        assert solve.call_count == 1
