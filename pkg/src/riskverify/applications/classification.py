"""Risk-aware classification robustness.

The input moments come from the data of one class c. The pipeline certifies
that class c wins in the worst-case CVaR sense, then measures the margin
P_diff = f_c − max_{i≠c} f_i under moment-matched samples from every family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from riskverify.applications.common import (
    file_tag,
    parse_matrix_field,
    parse_network,
    run_ordered,
)
from riskverify.applications.distributions import (
    DistributionSpec,
    default_distributions,
    derive_seed,
    moment_estimate,
    parse_distribution,
    sample,
)
from riskverify.config import Config
from riskverify.errors import ConfigError, EmptyInput, InvalidClassIndex, InvalidParameter
from riskverify.formatters.report_formatter import write_csv, write_json
from riskverify.logging import get_logger
from riskverify.network import Network, evaluate, fit_band_classifier, network_to_dict
from riskverify.qc.input import input_qc_ellipsoid
from riskverify.qc.safety import ClassificationMode
from riskverify.risk import MomentSet, as_risk_level, empirical_cvar
from riskverify.risk.moments import FloatArray
from riskverify.verifier import ClassificationCertificate, verify_classification

logger = get_logger("applications.classification")

DEFAULT_CENTERS = [[-4.0, 0.0], [0.0, 0.0], [4.0, 0.0]]
HISTOGRAM_BINS = 50


@dataclass(frozen=True)
class MarginStats:
    """Summary of P_diff samples; ``cvar`` averages the worst ε-fraction of margins."""

    mean: float
    median: float
    std_dev: float
    positive_ratio: float
    cvar: float
    epsilon: float

    def cvar_at(self, eps: float) -> float:
        if eps != self.epsilon:
            raise InvalidParameter(f"stats were computed at epsilon={self.epsilon}, not {eps}")
        return self.cvar


def margins(scores: ArrayLike, c: int) -> FloatArray:
    """P_diff = f_c − max_{i≠c} f_i per row of an (N, m) score matrix."""
    f = np.atleast_2d(np.asarray(scores, dtype=float))
    m = f.shape[1]
    if not 0 <= c < m or m < 2:
        raise InvalidClassIndex(f"class index {c} out of range for {m} classes")
    rivals = np.delete(f, c, axis=1)
    return f[:, c] - rivals.max(axis=1)


def margin_stats(p_diff: ArrayLike, eps: float) -> MarginStats:
    """Mean, median, sample standard deviation, positive ratio and lower-tail CVaR.

    Raises:
        EmptyInput: If no margins are given.
    """
    values = np.asarray(p_diff, dtype=float).ravel()
    if values.size == 0:
        raise EmptyInput("margin statistics need at least one sample")
    level = as_risk_level(eps).epsilon
    return MarginStats(
        mean=float(values.mean()),
        median=float(np.median(values)),
        std_dev=float(values.std(ddof=1)) if values.size > 1 else 0.0,
        positive_ratio=float(np.mean(values > 0.0)),
        cvar=-empirical_cvar(-values, level),
        epsilon=level,
    )


def synthetic_classes(
    centers: ArrayLike = DEFAULT_CENTERS,
    std: float = 0.5,
    per_class: int = 200,
    seed: int = 0,
) -> tuple[FloatArray, np.ndarray]:
    """Isotropic Gaussian blobs, one per center; returns (data, labels)."""
    mu = np.atleast_2d(np.asarray(centers, dtype=float))
    if std <= 0 or per_class < 2:
        raise InvalidParameter("std must be positive and per_class at least 2")
    rng = np.random.default_rng(seed)
    data = np.vstack(
        [rng.normal(loc=center, scale=std, size=(per_class, mu.shape[1])) for center in mu]
    )
    labels = np.repeat(np.arange(mu.shape[0]), per_class)
    return data, labels


@dataclass(frozen=True)
class ClassificationConfig:
    """A parsed classification experiment."""

    network: Network
    data: FloatArray
    labels: np.ndarray
    class_index: int
    epsilon: float
    distributions: list[DistributionSpec]
    moments: MomentSet
    mode: ClassificationMode = ClassificationMode.PER_HYPERPLANE
    samples: int = 100_000
    bins: int = HISTOGRAM_BINS
    seed: int = 0


def validate_classification_config(data: dict[str, Any]) -> str | None:
    """Return an error message for an invalid classification config, else None."""
    if not isinstance(data.get("class"), int) or isinstance(data.get("class"), bool):
        return "class must be an integer"
    eps = data.get("epsilon")
    if not isinstance(eps, (int, float)) or isinstance(eps, bool):
        return "epsilon must be numeric"
    modes = [mode.value for mode in ClassificationMode]
    if data.get("mode", ClassificationMode.PER_HYPERPLANE.value) not in modes:
        return f"mode must be one of: {', '.join(modes)}"
    samples = data.get("samples", 100_000)
    if not isinstance(samples, int) or samples < 1:
        return "samples must be a positive integer"
    return None


def _load_data(data: dict[str, Any], base: Path | None) -> tuple[FloatArray, np.ndarray]:
    if "data_file" in data:
        table = parse_matrix_field(data["data_file"], "data_file", base)
        if table.shape[1] < 2:
            raise ConfigError("data_file needs feature columns and a final label column")
        return table[:, :-1], table[:, -1].astype(int)
    synthetic = data.get("synthetic", {})
    if not isinstance(synthetic, dict):
        raise ConfigError("synthetic must be an object")
    return synthetic_classes(
        synthetic.get("centers", DEFAULT_CENTERS),
        float(synthetic.get("std", 0.5)),
        int(synthetic.get("per_class", 200)),
        int(synthetic.get("seed", data.get("seed", 0))),
    )


def parse_classification_config(
    data: dict[str, Any], base: Path | None, config: Config
) -> ClassificationConfig:
    """Validate and resolve a classification config.

    Without a ``network`` entry a band classifier is fitted to the data.

    Raises:
        ConfigError: If the config is invalid.
        ParseError: If a referenced file cannot be read.
    """
    error = validate_classification_config(data)
    if error:
        raise ConfigError(error)
    features, labels = _load_data(data, base)
    if "network" in data:
        net = parse_network(data["network"], base)
    else:
        net = fit_band_classifier(features, labels, float(data.get("margin", 0.5)))
    c = int(data["class"])
    if not 0 <= c < net.output_dim:
        raise InvalidClassIndex(f"class index {c} out of range for {net.output_dim} classes")
    members = features[labels == c]
    moments = moment_estimate(members).with_ridge(config.data_ridge)
    seed = int(data.get("seed", config.seed))
    entries = data.get("distributions") or []
    distributions = (
        [parse_distribution(e, moments, derive_seed(seed, i)) for i, e in enumerate(entries)]
        if entries
        else default_distributions(moments, seed)
    )
    return ClassificationConfig(
        network=net,
        data=features,
        labels=labels,
        class_index=c,
        epsilon=as_risk_level(float(data["epsilon"])).epsilon,
        distributions=distributions,
        moments=moments,
        mode=ClassificationMode(data.get("mode", ClassificationMode.PER_HYPERPLANE.value)),
        samples=int(data.get("samples", 100_000)),
        bins=int(data.get("bins", HISTOGRAM_BINS)),
        seed=seed,
    )


@dataclass(frozen=True)
class FamilyResult:
    """Margin statistics, per-rival CVaRs and a histogram for one family."""

    family: str
    stats: MarginStats
    rival_cvars: dict[int, float]
    histogram: tuple[FloatArray, FloatArray]

    def to_row(self, rivals: list[int]) -> list[Any]:
        s = self.stats
        return [
            self.family,
            s.mean,
            s.median,
            s.std_dev,
            s.positive_ratio,
            s.cvar,
            *(self.rival_cvars[i] for i in rivals),
        ]


@dataclass(frozen=True)
class ClassificationReport:
    class_index: int
    epsilon: float
    certificate: ClassificationCertificate
    families: list[FamilyResult]
    network: Network
    data_ridge: float
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def rivals(self) -> list[int]:
        return sorted(self.families[0].rival_cvars) if self.families else []

    def header(self) -> list[str]:
        base = ["family", "mean", "median", "std_dev", "positive_ratio", f"cvar_{self.epsilon:g}"]
        return base + [f"rival_{i}_cvar" for i in self.rivals]

    def to_dict(self) -> dict[str, Any]:
        return {
            "class": self.class_index,
            "epsilon": self.epsilon,
            "data_ridge": self.data_ridge,
            "certificate": self.certificate.to_dict(),
            "network_metadata": dict(self.network.metadata),
            **self.extras,
        }

    def write(self, out_dir: str | Path) -> list[Path]:
        """Write certificate.json, network.json, stats.csv and plotdata/hist_*.csv."""
        out = Path(out_dir)
        written = [out / "certificate.json", out / "network.json", out / "stats.csv"]
        write_json(written[0], self.to_dict())
        write_json(written[1], network_to_dict(self.network))
        rivals = self.rivals
        write_csv(written[2], self.header(), [f.to_row(rivals) for f in self.families])
        for family in self.families:
            counts, edges = family.histogram
            path = out / "plotdata" / f"hist_{file_tag(family.family)}.csv"
            rows = [[edges[i], edges[i + 1], int(counts[i])] for i in range(counts.shape[0])]
            write_csv(path, ["bin_left", "bin_right", "count"], rows)
            written.append(path)
        return written


def _family_result(cfg: ClassificationConfig, spec: DistributionSpec) -> FamilyResult:
    scores = evaluate(cfg.network, sample(spec, cfg.samples))
    c = cfg.class_index
    p_diff = margins(scores, c)
    rivals = {
        i: empirical_cvar(scores[:, i] - scores[:, c], cfg.epsilon)
        for i in range(scores.shape[1])
        if i != c
    }
    counts, edges = np.histogram(p_diff, bins=cfg.bins)
    stats = margin_stats(p_diff, cfg.epsilon)
    logger.info(
        "Family evaluated",
        extra={"family": spec.label, "positive_ratio": stats.positive_ratio, "cvar": stats.cvar},
    )
    return FamilyResult(spec.label, stats, rivals, (counts, edges))


def run_classification_experiment(
    cfg: ClassificationConfig, config: Config | None = None
) -> ClassificationReport:
    """Certify class c and tabulate margin statistics for every family."""
    config = config or Config()
    qc = input_qc_ellipsoid(cfg.moments, cfg.epsilon, config.covariance_ridge)
    certificate = verify_classification(
        cfg.network, qc, cfg.class_index, cfg.moments, cfg.epsilon, cfg.mode, config
    )
    logger.info(
        "Classification certificate",
        extra={"class": cfg.class_index, "status": certificate.status.value},
    )
    families = run_ordered(lambda spec: _family_result(cfg, spec), cfg.distributions, config.jobs)
    accuracy = float(np.mean(np.argmax(evaluate(cfg.network, cfg.data), axis=1) == cfg.labels))
    return ClassificationReport(
        class_index=cfg.class_index,
        epsilon=cfg.epsilon,
        certificate=certificate,
        families=families,
        network=cfg.network,
        data_ridge=config.data_ridge,
        extras={"accuracy": accuracy},
    )
