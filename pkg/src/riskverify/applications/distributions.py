"""Moment-matched sampling from a zoo of distribution families.

Each family is standardized componentwise to zero mean and unit variance
with its analytic moments, then mapped through μ + Σ^{1/2}·y.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats

from riskverify.errors import ConfigError, InsufficientData, InvalidParameter
from riskverify.risk.moments import FloatArray, MomentSet

DEFAULT_PARAMS: dict[str, dict[str, float]] = {
    "uniform": {},
    "normal": {},
    "student_t": {"df": 5.0},
    "weibull": {"shape": 1.5},
    "lognormal": {"sigma": 0.5},
    "powerlaw": {"alpha": 4.5},
}


def _uniform(params: dict[str, float]) -> Any:
    return stats.uniform(loc=-math.sqrt(3.0), scale=2.0 * math.sqrt(3.0))


def _normal(params: dict[str, float]) -> Any:
    return stats.norm()


def _student_t(params: dict[str, float]) -> Any:
    df = params["df"]
    if df <= 2.0:
        raise InvalidParameter(f"student_t needs df > 2 for a finite covariance, got {df}")
    return stats.t(df)


def _weibull(params: dict[str, float]) -> Any:
    if params["shape"] <= 0:
        raise InvalidParameter("weibull shape must be positive")
    return stats.weibull_min(params["shape"])


def _lognormal(params: dict[str, float]) -> Any:
    if params["sigma"] <= 0:
        raise InvalidParameter("lognormal sigma must be positive")
    return stats.lognorm(params["sigma"])


def _powerlaw(params: dict[str, float]) -> Any:
    if params["alpha"] <= 0:
        raise InvalidParameter("powerlaw alpha must be positive")
    return stats.powerlaw(params["alpha"])


FAMILIES: dict[str, Callable[[dict[str, float]], Any]] = {
    "uniform": _uniform,
    "normal": _normal,
    "student_t": _student_t,
    "weibull": _weibull,
    "lognormal": _lognormal,
    "powerlaw": _powerlaw,
}


def derive_seed(base: int, index: int) -> int:
    """Per-task seed, independent of scheduling order."""
    return int(base) ^ int(index)


@dataclass(frozen=True)
class DistributionSpec:
    """A base family, its shape parameters and the moments it is matched to."""

    family: str
    target: MomentSet
    seed: int = 0
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidParameter(
                f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}"
            )
        merged = {**DEFAULT_PARAMS[self.family], **self.params}
        unknown = set(merged) - set(DEFAULT_PARAMS[self.family])
        if unknown:
            raise InvalidParameter(f"{self.family} does not take {', '.join(sorted(unknown))}")
        object.__setattr__(self, "params", {k: float(v) for k, v in merged.items()})
        # Validates the parameters up front.
        FAMILIES[self.family](self.params)

    @property
    def label(self) -> str:
        """Family name with its parameters, e.g. ``student_t(df=3)``."""
        extras = [f"{k}={v:g}" for k, v in self.params.items()]
        return f"{self.family}({', '.join(extras)})" if extras else self.family

    def base_distribution(self) -> Any:
        return FAMILIES[self.family](self.params)

    def with_seed(self, seed: int) -> DistributionSpec:
        return DistributionSpec(self.family, self.target, seed, self.params)


def standardized(
    spec: DistributionSpec, n_samples: int, n: int, rng: np.random.Generator
) -> FloatArray:
    """(n_samples, n) draws with zero mean and unit variance per coordinate."""
    dist = spec.base_distribution()
    mean, std = float(dist.mean()), float(dist.std())
    draws = dist.rvs(size=(n_samples, n), random_state=rng)
    return (np.asarray(draws, dtype=float) - mean) / std


def sample(spec: DistributionSpec, n_samples: int) -> FloatArray:
    """Draw i.i.d. samples whose mean and covariance match ``spec.target``.

    The stream is fully determined by ``spec.seed``.
    """
    if n_samples < 1:
        raise InvalidParameter("n_samples must be positive")
    rng = np.random.default_rng(spec.seed)
    y = standardized(spec, n_samples, spec.target.dim, rng)
    root = spec.target.sqrt_covariance()
    return spec.target.mean + y @ root.T


def moment_estimate(data: ArrayLike) -> MomentSet:
    """Sample mean and biased (1/N) covariance of the rows of ``data``.

    Raises:
        InsufficientData: With fewer than two rows.
    """
    x = np.atleast_2d(np.asarray(data, dtype=float))
    if x.shape[0] < 2:
        raise InsufficientData(f"need at least 2 rows to estimate moments, got {x.shape[0]}")
    mean = x.mean(axis=0)
    centred = x - mean
    cov = centred.T @ centred / x.shape[0]
    return MomentSet(mean, 0.5 * (cov + cov.T))


def validate_distribution(entry: dict[str, Any]) -> str | None:
    """Return an error message for an invalid distribution entry, else None."""
    family = entry.get("family")
    if family not in FAMILIES:
        return f"family must be one of: {', '.join(FAMILIES)}"
    for key, value in entry.items():
        if key == "family":
            continue
        if key not in DEFAULT_PARAMS[family]:
            return f"{family} does not take parameter {key}"
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            return f"{family} parameter {key} must be numeric"
    return None


def parse_distribution(entry: dict[str, Any], target: MomentSet, seed: int = 0) -> DistributionSpec:
    """Build a spec from a config entry such as ``{"family": "student_t", "df": 3}``."""
    error = validate_distribution(entry)
    if error:
        raise ConfigError(error)
    params = {k: float(v) for k, v in entry.items() if k != "family"}
    return DistributionSpec(entry["family"], target, seed, params)


def default_distributions(target: MomentSet, seed: int = 0) -> list[DistributionSpec]:
    """One spec per family with default parameters, seeds derived per index."""
    return [
        DistributionSpec(family, target, derive_seed(seed, index))
        for index, family in enumerate(FAMILIES)
    ]
