"""BDD test fixtures and step definitions."""

from __future__ import annotations

from typing import Any

import numpy as np
import pytest
from pytest_bdd import given, parsers

from riskverify.config import Config
from riskverify.risk import MomentSet


# Shared BDD fixtures
@pytest.fixture
def bdd_config() -> Config:
    """BDD test configuration."""
    return Config(log_json=False, log_level="WARNING")


# Shared context for BDD scenarios
@pytest.fixture
def bdd_context() -> dict[str, Any]:
    """Shared context dict for passing data between BDD steps."""
    return {}


@given(parsers.parse("zero-mean moments with covariance {scale:g} I in {n:d} dimensions"))
def isotropic_moments(bdd_context: dict[str, Any], scale: float, n: int) -> None:
    """Store an isotropic moment set."""
    bdd_context["moments"] = MomentSet(np.zeros(n), scale * np.eye(n))


@given(parsers.parse("a risk level of {eps:g}"))
def risk_level(bdd_context: dict[str, Any], eps: float) -> None:
    """Store the risk level."""
    bdd_context["eps"] = eps
