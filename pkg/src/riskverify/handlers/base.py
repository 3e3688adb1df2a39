"""Shared plumbing for subcommand handlers."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import TYPE_CHECKING, Any

from riskverify.applications.common import parse_matrix_field, parse_moments, parse_vector_field
from riskverify.errors import ConfigError
from riskverify.formatters.report_formatter import dumps_json
from riskverify.logging import get_logger
from riskverify.manifest import RunManifest
from riskverify.metrics import get_metrics
from riskverify.risk.moments import MomentSet

if TYPE_CHECKING:
    from riskverify.config import Config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_UNDETERMINED = 4


class CommandHandler:
    """Base class: one instance per subcommand invocation."""

    command = "command"

    def __init__(self, config: Config) -> None:
        self.config = config
        self.logger = get_logger(f"handlers.{self.command}")
        self.metrics = get_metrics()
        self._counter = self.metrics.counter("commands_total", "Subcommand outcomes")
        self.started = time.perf_counter()

    def handle(self, args: argparse.Namespace) -> int:
        raise NotImplementedError

    def count(self, status: str) -> None:
        self._counter.labels(command=self.command, status=status).inc()

    def emit(self, result: Any) -> None:
        """Print a command result as JSON on stdout."""
        sys.stdout.write(dumps_json(result) + "\n")

    def write_manifest(
        self,
        out_dir: str | Path,
        payload: dict[str, Any],
        seed: int,
        outputs: list[Path],
    ) -> Path:
        manifest = RunManifest.build(
            self.command,
            payload,
            seed,
            self.started,
            settings=self.config.to_dict(),
            outputs=[Path(os.path.relpath(p, out_dir)) for p in outputs],
        )
        path = manifest.write(out_dir)
        self.logger.info("Wrote manifest", extra={"path": str(path), "outputs": len(outputs)})
        return path


def moments_from_args(args: argparse.Namespace, data_ridge: float) -> MomentSet:
    """--mean/--cov files (or inline JSON arrays), or --data for estimated moments."""
    if getattr(args, "data", None):
        return parse_moments({"data": args.data}, None, data_ridge)
    if not args.mean or not args.cov:
        raise ConfigError("--mean and --cov (or --data) are required")
    return MomentSet(
        parse_vector_field(inline_or_path(args.mean), "--mean", None),
        parse_matrix_field(inline_or_path(args.cov), "--cov", None),
    )


def inline_or_path(value: str) -> Any:
    """``[1, 2]`` style inline JSON is decoded; anything else is a file path."""
    stripped = value.strip()
    if stripped.startswith("["):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid inline array {value!r}: {e.msg}") from e
    return value


def arguments(args: argparse.Namespace) -> dict[str, Any]:
    """Parsed CLI arguments without dispatch entries or the output directory."""
    return {k: v for k, v in vars(args).items() if not callable(v) and k != "out"}
