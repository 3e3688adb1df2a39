"""Closed-loop reachability of x⁺ = Ax + Bf(x) with a ReLU controller.

For each risk level the pipeline builds the input QC, synthesizes the
minimum-volume ellipsoid containing x⁺ in the worst-case CVaR sense,
re-verifies the frozen ellipsoid and checks it against moment-matched
samples from every configured distribution family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from riskverify.applications.common import (
    file_tag,
    parse_epsilons,
    parse_matrix_field,
    parse_moments,
    parse_network,
    run_ordered,
)
from riskverify.applications.distributions import (
    DistributionSpec,
    default_distributions,
    derive_seed,
    parse_distribution,
    sample,
)
from riskverify.config import Config
from riskverify.errors import ConfigError, DimensionMismatch
from riskverify.formatters.report_formatter import write_csv, write_json
from riskverify.logging import get_logger
from riskverify.network import Network, evaluate
from riskverify.qc.input import InputQc, input_qc_ball, input_qc_confidence, input_qc_ellipsoid
from riskverify.qc.safety import safety_qc_ellipsoid
from riskverify.risk import MomentSet, bootstrap_cvar_stderr, empirical_cvar
from riskverify.risk.moments import FloatArray
from riskverify.verifier import Certificate, Ellipsoid, min_volume_ellipsoid, verify

logger = get_logger("applications.reachability")

BOUNDARY_POINTS = 360


class InputMode(str, Enum):
    """How the input set is derived for each ε."""

    RISK = "risk"
    CONFIDENCE = "confidence"
    NORM_BOUNDED = "norm_bounded"


@dataclass(frozen=True, eq=False)
class LtiSystem:
    """Discrete-time linear system x⁺ = Ax + Bu."""

    A: FloatArray
    B: FloatArray

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B.reshape(-1, 1)
        if A.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"B has {B.shape[0]} rows, A has {A.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def state_dim(self) -> int:
        return int(self.A.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.B.shape[1])

    @property
    def output_map(self) -> FloatArray:
        """C = [A B], so x⁺ = C[x; f(x)]."""
        return np.hstack([self.A, self.B])

    def check_controller(self, net: Network) -> None:
        if net.input_dim != self.state_dim or net.output_dim != self.input_dim:
            raise DimensionMismatch(
                f"controller maps {net.input_dim} -> {net.output_dim}, "
                f"system needs {self.state_dim} -> {self.input_dim}"
            )


def reach_step(system: LtiSystem, net: Network, x: ArrayLike) -> FloatArray:
    """One closed-loop step for each row of an (N, n) batch.

    Raises:
        DimensionMismatch: If the controller or batch does not fit the system.
    """
    system.check_controller(net)
    batch = np.atleast_2d(np.asarray(x, dtype=float))
    return batch @ system.A.T + evaluate(net, batch) @ system.B.T


@dataclass(frozen=True)
class ReachabilityConfig:
    """A parsed reachability experiment."""

    system: LtiSystem
    network: Network
    moments: MomentSet
    epsilons: list[float]
    distributions: list[DistributionSpec]
    samples: int = 100_000
    mode: InputMode = InputMode.RISK
    radius_sq: float = 1.0
    plot_samples: int = 2000
    seed: int = 0


def validate_reachability_config(data: dict[str, Any]) -> str | None:
    """Return an error message for an invalid reachability config, else None."""
    for key in ("system", "network", "moments", "epsilons"):
        if key not in data:
            return f"{key} is required"
    system = data["system"]
    if not isinstance(system, dict) or "A" not in system or "B" not in system:
        return "system requires A and B"
    modes = [mode.value for mode in InputMode]
    if data.get("input_mode", InputMode.RISK.value) not in modes:
        return f"input_mode must be one of: {', '.join(modes)}"
    samples = data.get("samples", 100_000)
    if not isinstance(samples, int) or samples < 1:
        return "samples must be a positive integer"
    if not isinstance(data.get("distributions", []), list):
        return "distributions must be a list"
    return None


def parse_reachability_config(
    data: dict[str, Any], base: Path | None, config: Config
) -> ReachabilityConfig:
    """Validate and resolve a reachability config.

    Raises:
        ConfigError: If the config is invalid.
        ParseError: If a referenced file cannot be read.
    """
    error = validate_reachability_config(data)
    if error:
        raise ConfigError(error)
    system = LtiSystem(
        parse_matrix_field(data["system"]["A"], "system.A", base),
        parse_matrix_field(data["system"]["B"], "system.B", base),
    )
    net = parse_network(data["network"], base)
    system.check_controller(net)
    moments = parse_moments(data["moments"], base, config.data_ridge)
    seed = int(data.get("seed", config.seed))
    entries = data.get("distributions") or []
    distributions = (
        [parse_distribution(e, moments, derive_seed(seed, i)) for i, e in enumerate(entries)]
        if entries
        else default_distributions(moments, seed)
    )
    return ReachabilityConfig(
        system=system,
        network=net,
        moments=moments,
        epsilons=parse_epsilons(data["epsilons"]),
        distributions=distributions,
        samples=int(data.get("samples", 100_000)),
        mode=InputMode(data.get("input_mode", InputMode.RISK.value)),
        radius_sq=float(data.get("radius_sq", 1.0)),
        plot_samples=int(data.get("plot_samples", 2000)),
        seed=seed,
    )


def input_set(cfg: ReachabilityConfig, eps: float, config: Config) -> InputQc:
    """Input QC for one ε under the configured mode."""
    if cfg.mode is InputMode.RISK:
        return input_qc_ellipsoid(cfg.moments, eps, config.covariance_ridge)
    if cfg.mode is InputMode.CONFIDENCE:
        return input_qc_confidence(cfg.moments, 1.0 - eps, config.covariance_ridge)
    return input_qc_ball(cfg.moments.dim, cfg.radius_sq)


@dataclass(frozen=True)
class SampleCheck:
    """Empirical behaviour of one distribution family against one ellipsoid."""

    epsilon: float
    family: str
    n_samples: int
    inside_fraction: float
    cvar: float
    cvar_stderr: float

    @property
    def within_bound(self) -> bool:
        """Empirical CVaR of yᵀE⁻¹y − 1 is ≤ 0 up to three standard errors."""
        return self.cvar <= 3.0 * self.cvar_stderr

    def to_row(self) -> list[Any]:
        return [
            self.epsilon,
            self.family,
            self.n_samples,
            self.inside_fraction,
            self.cvar,
            self.cvar_stderr,
            self.within_bound,
        ]


STATS_HEADER = [
    "epsilon",
    "family",
    "n_samples",
    "inside_fraction",
    "cvar",
    "cvar_stderr",
    "within_bound",
]


@dataclass(frozen=True)
class EpsilonResult:
    epsilon: float
    input_qc: InputQc
    ellipsoid: Ellipsoid | None
    certificate: Certificate
    reverified: Certificate | None
    checks: list[SampleCheck] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "radius_sq": self.input_qc.radius_sq,
            "ellipsoid": None if self.ellipsoid is None else self.ellipsoid.to_dict(),
            "certificate": self.certificate.to_dict(),
            "reverified": None if self.reverified is None else self.reverified.status.value,
        }


@dataclass(frozen=True)
class ReachabilityReport:
    mode: InputMode
    results: list[EpsilonResult]
    clouds: dict[str, FloatArray]

    def to_dict(self) -> dict[str, Any]:
        return {"mode": self.mode.value, "ellipsoids": [r.to_dict() for r in self.results]}

    def write(self, out_dir: str | Path) -> list[Path]:
        """Write ellipsoids.json, stats.csv and plotdata/*.csv; return the written paths."""
        out = Path(out_dir)
        written = [out / "ellipsoids.json", out / "stats.csv"]
        write_json(written[0], self.to_dict())
        write_csv(
            written[1], STATS_HEADER, [c.to_row() for r in self.results for c in r.checks]
        )
        plot_dir = out / "plotdata"
        for result in self.results:
            tag = f"eps_{result.epsilon:g}"
            if result.ellipsoid is not None and result.ellipsoid.dim == 2:
                path = plot_dir / f"ellipse_{tag}.csv"
                write_csv(path, ["y0", "y1"], result.ellipsoid.boundary_points(BOUNDARY_POINTS))
                written.append(path)
            for family, cloud in self.clouds.items():
                path = plot_dir / f"samples_{tag}_{file_tag(family)}.csv"
                header = [f"y{i}" for i in range(cloud.shape[1])] + ["inside"]
                inside = (
                    result.ellipsoid.contains(cloud)
                    if result.ellipsoid is not None
                    else np.zeros(cloud.shape[0], dtype=bool)
                )
                write_csv(
                    path, header, [[*row, int(flag)] for row, flag in zip(cloud, inside)]
                )
                written.append(path)
        return written


def _certify(cfg: ReachabilityConfig, eps: float, config: Config) -> EpsilonResult:
    qc = input_set(cfg, eps, config)
    check = cfg.mode is not InputMode.NORM_BOUNDED
    C = cfg.system.output_map
    ellipsoid, certificate = min_volume_ellipsoid(
        cfg.network, qc, C, cfg.moments, eps, config, check_input=check
    )
    reverified = None
    if ellipsoid is not None:
        safety = safety_qc_ellipsoid(ellipsoid.shape, C, cfg.system.state_dim)
        reverified = verify(cfg.network, qc, safety, cfg.moments, eps, config, check_input=False)
    logger.info(
        "Reachable set computed",
        extra={
            "epsilon": eps,
            "mode": cfg.mode.value,
            "log_det": None if ellipsoid is None else ellipsoid.log_det,
            "reverified": None if reverified is None else reverified.status.value,
        },
    )
    return EpsilonResult(eps, qc, ellipsoid, certificate, reverified)


def _check_samples(
    eps: float,
    ellipsoid: Ellipsoid,
    family: str,
    successors: FloatArray,
    config: Config,
    seed: int,
) -> SampleCheck:
    loss = ellipsoid.quadratic(successors)
    rng = np.random.default_rng(seed)
    return SampleCheck(
        epsilon=eps,
        family=family,
        n_samples=int(loss.shape[0]),
        inside_fraction=float(np.mean(loss <= 0.0)),
        cvar=empirical_cvar(loss, eps),
        cvar_stderr=bootstrap_cvar_stderr(loss, eps, config.bootstrap_resamples, rng),
    )


def run_reachability_experiment(
    cfg: ReachabilityConfig, config: Config | None = None
) -> ReachabilityReport:
    """Run the ε sweep and the sampling checks.

    Solves and family sampling run on up to ``config.jobs`` threads;
    results keep the order of the config.
    """
    config = config or Config()
    results = run_ordered(lambda eps: _certify(cfg, eps, config), cfg.epsilons, config.jobs)

    def successors(spec: DistributionSpec) -> FloatArray:
        return reach_step(cfg.system, cfg.network, sample(spec, cfg.samples))

    clouds = run_ordered(successors, cfg.distributions, config.jobs)
    labels = [spec.label for spec in cfg.distributions]

    final = []
    for index, result in enumerate(results):
        checks = []
        if result.ellipsoid is not None:
            checks = [
                _check_samples(
                    result.epsilon,
                    result.ellipsoid,
                    label,
                    cloud,
                    config,
                    derive_seed(cfg.seed, 1000 * (index + 1) + k),
                )
                for k, (label, cloud) in enumerate(zip(labels, clouds))
            ]
        final.append(
            EpsilonResult(
                result.epsilon,
                result.input_qc,
                result.ellipsoid,
                result.certificate,
                result.reverified,
                checks,
            )
        )
    plot = {label: cloud[: cfg.plot_samples] for label, cloud in zip(labels, clouds)}
    return ReachabilityReport(cfg.mode, final, plot)
