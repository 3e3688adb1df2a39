"""Tests for moment sets, risk levels and quadratic losses."""

from __future__ import annotations

import numpy as np
import pytest

from riskverify.errors import DimensionMismatch, InvalidCovariance, InvalidRiskLevel
from riskverify.risk import MomentSet, QuadraticLoss, RiskLevel, build_omega


class TestRiskLevel:
    """Tests for RiskLevel validation."""

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
    def test_rejects_outside_open_interval(self, eps: float) -> None:
        """Test that ε must lie strictly between 0 and 1."""
        with pytest.raises(InvalidRiskLevel, match=r"risk level must be in \(0,1\)"):
            RiskLevel(eps)

    def test_float_conversion(self) -> None:
        """Test that a level converts to its ε."""
        assert float(RiskLevel(0.25)) == 0.25


class TestMomentSet:
    """Tests for MomentSet construction."""

    def test_shape_mismatch(self) -> None:
        """Test that mean and covariance must agree in size."""
        with pytest.raises(DimensionMismatch):
            MomentSet(np.zeros(2), np.eye(3))

    def test_rejects_indefinite_covariance(self) -> None:
        """Test that a clearly indefinite covariance is rejected."""
        with pytest.raises(InvalidCovariance):
            MomentSet(np.zeros(2), np.diag([1.0, -0.5]))

    def test_clips_tiny_negative_eigenvalues(self) -> None:
        """Test that rounding noise below zero is clipped."""
        ms = MomentSet(np.zeros(2), np.diag([1.0, -1e-12]))
        assert np.linalg.eigvalsh(ms.covariance).min() >= -1e-15

    def test_symmetrizes_covariance(self) -> None:
        """Test that a slightly asymmetric covariance is symmetrized."""
        ms = MomentSet(np.zeros(2), [[1.0, 0.2], [0.0, 1.0]])
        np.testing.assert_allclose(ms.covariance, [[1.0, 0.1], [0.1, 1.0]])

    def test_arrays_are_read_only(self, unit_moments: MomentSet) -> None:
        """Test that a moment set cannot be mutated in place."""
        with pytest.raises(ValueError):
            unit_moments.mean[0] = 1.0

    def test_inverse_with_ridge_for_singular(self) -> None:
        """Test that a singular covariance is regularized before inversion."""
        ms = MomentSet(np.zeros(2), np.diag([1.0, 0.0]))
        inv = ms.inverse_covariance(1e-6)
        assert np.isfinite(inv).all()
        assert inv[1, 1] == pytest.approx(1e6)

    def test_sqrt_covariance(self) -> None:
        """Test the symmetric square root."""
        ms = MomentSet(np.zeros(2), [[2.0, 0.5], [0.5, 1.0]])
        root = ms.sqrt_covariance()
        np.testing.assert_allclose(root @ root, ms.covariance, atol=1e-12)


class TestBuildOmega:
    """Tests for the second-order moment matrix."""

    def test_identity(self, unit_moments: MomentSet) -> None:
        """Test that μ = 0, Σ = I gives Ω = I."""
        np.testing.assert_allclose(build_omega(unit_moments).omega, np.eye(3))

    def test_shifted_mean(self) -> None:
        """Test direct substitution with μ = [1, 0]."""
        omega = build_omega(MomentSet([1.0, 0.0], np.eye(2))).omega
        np.testing.assert_allclose(omega, [[2, 0, 1], [0, 1, 0], [1, 0, 1]])

    def test_quarter_covariance(self, quarter_moments: MomentSet) -> None:
        """Test Ω = diag(1/4, 1/4, 1) for the case-study moments."""
        omega = build_omega(quarter_moments)
        np.testing.assert_allclose(omega.omega, np.diag([0.25, 0.25, 1.0]))
        assert omega.dim == 2


class TestQuadraticLoss:
    """Tests for QuadraticLoss."""

    def test_matrix_round_trip(self) -> None:
        """Test splitting a lifted matrix back into (Π, θ, ρ)."""
        loss = QuadraticLoss([[1.0, 0.5], [0.5, 2.0]], [1.0, -1.0], 3.0)
        again = QuadraticLoss.from_matrix(loss.to_matrix())
        np.testing.assert_allclose(again.quad, loss.quad)
        np.testing.assert_allclose(again.lin, loss.lin)
        assert again.const == 3.0

    def test_evaluate(self) -> None:
        """Test xᵀΠx + 2θᵀx + ρ row-wise."""
        loss = QuadraticLoss(np.eye(2), [1.0, 0.0], -1.0)
        values = loss.evaluate([[1.0, 1.0], [0.0, 0.0]])
        np.testing.assert_allclose(values, [3.0, -1.0])

    def test_linear_term_length(self) -> None:
        """Test that θ must match Π."""
        with pytest.raises(DimensionMismatch):
            QuadraticLoss(np.eye(2), [1.0, 2.0, 3.0])

    def test_arithmetic(self) -> None:
        """Test sum, scaling and shift."""
        a = QuadraticLoss(np.eye(2), [1.0, 0.0], 1.0)
        b = QuadraticLoss.constant(2, 2.0)
        total = (a + b).scaled(2.0).shifted(1.0)
        np.testing.assert_allclose(total.quad, 2.0 * np.eye(2))
        np.testing.assert_allclose(total.lin, [2.0, 0.0])
        assert total.const == 7.0
