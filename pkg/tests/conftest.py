"""Shared pytest fixtures for riskverify tests."""

from __future__ import annotations

from collections.abc import Generator

import numpy as np
import pytest

from riskverify.applications import LtiSystem
from riskverify.applications.common import bundled_path
from riskverify.config import Config
from riskverify.metrics import reset_metrics
from riskverify.network import Network, identity_network, load_network
from riskverify.risk import MomentSet


@pytest.fixture(autouse=True)
def fresh_metrics() -> Generator[None, None, None]:
    """Give every test an empty metrics registry."""
    reset_metrics()
    yield
    reset_metrics()


@pytest.fixture
def config() -> Config:
    """Default tolerances with text logs."""
    return Config(log_json=False, log_level="DEBUG")


@pytest.fixture
def quarter_moments() -> MomentSet:
    """μ = 0, Σ = I/4 in two dimensions."""
    return MomentSet(np.zeros(2), 0.25 * np.eye(2))


@pytest.fixture
def unit_moments() -> MomentSet:
    """μ = 0, Σ = I in two dimensions."""
    return MomentSet(np.zeros(2), np.eye(2))


@pytest.fixture
def controller() -> Network:
    """The bundled 2-3-1 ReLU controller realizing u = [-1, 2]x."""
    return load_network(bundled_path("controller_2_3_1.json"))


@pytest.fixture
def passthrough() -> Network:
    """x ↦ x on the region any test input reaches."""
    return identity_network(2, shift=5.0)


@pytest.fixture
def random_net() -> Network:
    """A seeded random 2-3-1 network with nonzero biases."""
    rng = np.random.default_rng(7)
    return Network.from_arrays(
        [rng.normal(size=(3, 2)), rng.normal(size=(1, 3))],
        [rng.normal(size=3), rng.normal(size=1)],
    )


@pytest.fixture
def lti_system() -> LtiSystem:
    """Dynamics of the bundled closed-loop case study."""
    return LtiSystem([[0.2, 0.0], [0.1, 0.3]], [[-1.0], [0.0]])
