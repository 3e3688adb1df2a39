"""Case-study pipelines: closed-loop reachability and classification robustness."""

from riskverify.applications.classification import (
    ClassificationConfig,
    ClassificationReport,
    MarginStats,
    margin_stats,
    margins,
    parse_classification_config,
    run_classification_experiment,
    synthetic_classes,
)
from riskverify.applications.distributions import (
    FAMILIES,
    DistributionSpec,
    default_distributions,
    derive_seed,
    moment_estimate,
    parse_distribution,
    sample,
)
from riskverify.applications.reachability import (
    InputMode,
    LtiSystem,
    ReachabilityConfig,
    ReachabilityReport,
    parse_reachability_config,
    reach_step,
    run_reachability_experiment,
)

__all__ = [
    "FAMILIES",
    "ClassificationConfig",
    "ClassificationReport",
    "DistributionSpec",
    "InputMode",
    "LtiSystem",
    "MarginStats",
    "ReachabilityConfig",
    "ReachabilityReport",
    "default_distributions",
    "derive_seed",
    "margin_stats",
    "margins",
    "moment_estimate",
    "parse_classification_config",
    "parse_distribution",
    "parse_reachability_config",
    "reach_step",
    "run_classification_experiment",
    "run_reachability_experiment",
    "sample",
    "synthetic_classes",
]
