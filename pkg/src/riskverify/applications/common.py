"""Experiment-config helpers shared by the pipelines."""

from __future__ import annotations

import json
import re
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Any, TypeVar

from riskverify.applications.distributions import moment_estimate
from riskverify.errors import ConfigError, ParseError
from riskverify.formatters.matrix_formatter import (
    coerce_matrix,
    coerce_vector,
    read_matrix,
    read_vector,
)
from riskverify.network import Network, load_network, network_from_dict
from riskverify.risk.moments import MomentSet

T = TypeVar("T")
R = TypeVar("R")

BUNDLED_PREFIX = "bundled:"


def bundled_path(name: str) -> Path:
    """Path of a data file shipped in ``riskverify/bundled``."""
    return Path(str(resources.files("riskverify.bundled").joinpath(name)))


def resolve_path(value: str, base: Path | None) -> Path:
    """Resolve ``bundled:name`` or a path relative to the config file's directory."""
    if value.startswith(BUNDLED_PREFIX):
        return bundled_path(value[len(BUNDLED_PREFIX):])
    path = Path(value)
    if not path.is_absolute() and base is not None:
        path = base / path
    return path


def load_json_config(path: str | Path) -> dict[str, Any]:
    """Read an experiment config file (``bundled:`` names allowed)."""
    resolved = resolve_path(str(path), None)
    try:
        data = json.loads(resolved.read_text())
    except OSError as e:
        raise ParseError(f"cannot read file ({e.strerror})", path=str(resolved)) from e
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=str(resolved), line=e.lineno) from e
    if not isinstance(data, dict):
        raise ConfigError(f"{resolved}: experiment config must be a JSON object")
    return data


def config_base(path: str | Path) -> Path:
    return resolve_path(str(path), None).parent


def parse_matrix_field(value: Any, field: str, base: Path | None) -> Any:
    """A matrix given inline or as a CSV/JSON file name."""
    if isinstance(value, str):
        return read_matrix(resolve_path(value, base))
    return coerce_matrix(value, field)


def parse_vector_field(value: Any, field: str, base: Path | None) -> Any:
    if isinstance(value, str):
        return read_vector(resolve_path(value, base))
    return coerce_vector(value, field)


def parse_moments(section: Any, base: Path | None, data_ridge: float) -> MomentSet:
    """``{"mean": ..., "covariance": ...}`` or ``{"data": "file.csv"}``.

    Moments estimated from data get ``data_ridge``·I added.
    """
    if not isinstance(section, dict):
        raise ConfigError("moments must be an object")
    if "data" in section:
        ms = moment_estimate(parse_matrix_field(section["data"], "moments.data", base))
        return ms.with_ridge(data_ridge)
    if "mean" not in section or "covariance" not in section:
        raise ConfigError("moments requires mean and covariance, or data")
    return MomentSet(
        parse_vector_field(section["mean"], "moments.mean", base),
        parse_matrix_field(section["covariance"], "moments.covariance", base),
    )


def parse_network(value: Any, base: Path | None) -> Network:
    """A network file name or an inline network object."""
    if isinstance(value, str):
        return load_network(resolve_path(value, base))
    if isinstance(value, dict):
        return network_from_dict(value)
    raise ConfigError("network must be a file name or an object")


def parse_epsilons(values: Any) -> list[float]:
    if not isinstance(values, list) or not values:
        raise ConfigError("epsilons must be a non-empty list")
    for value in values:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError("epsilons must be numeric")
        if not 0.0 < value < 1.0:
            raise ConfigError(f"epsilons must lie in (0,1), got {value}")
    return [float(v) for v in values]


def run_ordered(func: Callable[[T], R], items: Sequence[T], jobs: int) -> list[R]:
    """Map ``func`` over ``items`` on up to ``jobs`` threads, results in item order."""
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(func, item) for item in items]
        return [future.result() for future in futures]


def file_tag(label: str) -> str:
    """Filesystem-safe form of a family label: ``student_t(df=3)`` → ``student_t_df_3``."""
    return re.sub(r"[^A-Za-z0-9.]+", "_", label).strip("_")
