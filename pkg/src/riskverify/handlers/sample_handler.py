"""``riskverify sample``: moment-matched samples from one family."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from riskverify.applications.distributions import DistributionSpec, sample
from riskverify.errors import ConfigError
from riskverify.formatters.matrix_formatter import format_float, write_matrix
from riskverify.handlers.base import EXIT_OK, CommandHandler, arguments, moments_from_args


def parse_params(values: list[str] | None) -> dict[str, float]:
    """``key=value`` pairs from repeated --param flags."""
    params: dict[str, float] = {}
    for item in values or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        try:
            params[key.strip()] = float(raw)
        except ValueError as e:
            raise ConfigError(f"--param {key.strip()} must be numeric, got {raw!r}") from e
    return params


class SampleHandler(CommandHandler):
    command = "sample"

    def handle(self, args: argparse.Namespace) -> int:
        ms = moments_from_args(args, self.config.data_ridge)
        seed = args.seed if args.seed is not None else self.config.seed
        spec = DistributionSpec(args.family, ms, seed, parse_params(args.param))
        draws = sample(spec, args.samples or 1000)

        if args.out:
            path = Path(args.out) / "samples.csv"
            write_matrix(path, draws)
            self.write_manifest(args.out, {"args": arguments(args)}, seed, [path])
        else:
            for row in draws:
                sys.stdout.write(",".join(format_float(v) for v in row) + "\n")
        self.logger.info(
            "Samples drawn", extra={"family": spec.label, "count": int(draws.shape[0])}
        )
        self.count("ok")
        return EXIT_OK
