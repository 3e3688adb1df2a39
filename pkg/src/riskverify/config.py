"""Configuration management for riskverify."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from typing_extensions import Self

SUPPORTED_SOLVERS = frozenset({"CLARABEL", "SCS", "MOSEK", "CVXOPT"})


def _env_bool(name: str, default: bool) -> bool:
    return os.getenv(name, "true" if default else "false").lower() == "true"


@dataclass(frozen=True)
class Config:
    """Numerical tolerances, solver choice and run settings."""

    tol_feas: float = 1e-7
    tol_psd: float = 1e-8
    solver: str = "CLARABEL"
    solver_fallback: str | None = "SCS"
    solver_tolerance: float = 1e-9
    accept_inaccurate: bool = True
    covariance_ridge: float = 1e-10
    data_ridge: float = 1e-6
    pairwise_multipliers: bool = False
    ellipsoid_backoff: float = 1e-5
    seed: int = 0
    jobs: int = 1
    bootstrap_resamples: int = 200
    log_level: str = "INFO"
    log_json: bool = True

    def __post_init__(self) -> None:
        if self.tol_feas < 0 or self.tol_psd < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.solver.upper() not in SUPPORTED_SOLVERS:
            raise ValueError(f"unsupported solver: {self.solver}")

    @classmethod
    def from_env(cls) -> Self:
        """Load configuration from RISKVERIFY_* environment variables."""
        fallback = os.getenv("RISKVERIFY_SOLVER_FALLBACK", "SCS")
        return cls(
            tol_feas=float(os.getenv("RISKVERIFY_TOL_FEAS", "1e-7")),
            tol_psd=float(os.getenv("RISKVERIFY_TOL_PSD", "1e-8")),
            solver=os.getenv("RISKVERIFY_SOLVER", "CLARABEL").upper(),
            solver_fallback=fallback.upper() if fallback else None,
            solver_tolerance=float(os.getenv("RISKVERIFY_SOLVER_TOLERANCE", "1e-9")),
            accept_inaccurate=_env_bool("RISKVERIFY_ACCEPT_INACCURATE", True),
            covariance_ridge=float(os.getenv("RISKVERIFY_COVARIANCE_RIDGE", "1e-10")),
            data_ridge=float(os.getenv("RISKVERIFY_DATA_RIDGE", "1e-6")),
            pairwise_multipliers=_env_bool("RISKVERIFY_PAIRWISE", False),
            ellipsoid_backoff=float(os.getenv("RISKVERIFY_ELLIPSOID_BACKOFF", "1e-5")),
            seed=int(os.getenv("RISKVERIFY_SEED", "0")),
            jobs=int(os.getenv("RISKVERIFY_JOBS", "1")),
            bootstrap_resamples=int(os.getenv("RISKVERIFY_BOOTSTRAP_RESAMPLES", "200")),
            log_level=os.getenv("RISKVERIFY_LOG_LEVEL", "INFO"),
            log_json=_env_bool("RISKVERIFY_LOG_JSON", True),
        )

    def with_overrides(self, **changes: Any) -> Self:
        """Return a copy with the given fields replaced; None values are ignored."""
        return dataclasses.replace(
            self, **{key: value for key, value in changes.items() if value is not None}
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert to a JSON-compatible dictionary."""
        return dataclasses.asdict(self)
