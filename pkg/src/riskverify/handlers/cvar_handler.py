"""``riskverify cvar``: worst-case CVaR of a quadratic loss."""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from riskverify.applications.common import parse_matrix_field, parse_vector_field
from riskverify.errors import ConfigError
from riskverify.formatters.report_formatter import write_json
from riskverify.handlers.base import (
    EXIT_OK,
    CommandHandler,
    arguments,
    inline_or_path,
    moments_from_args,
)
from riskverify.risk import MomentSet, QuadraticLoss, RiskLevel, solve_wc_cvar

QUAD_KEYWORDS = ("invcov", "identity", "zero")


def build_loss(args: argparse.Namespace, ms: MomentSet, ridge: float) -> QuadraticLoss:
    """Π from --quad (file, inline array or keyword), θ from --lin, ρ from --const."""
    n = ms.dim
    quad_arg = args.quad or "zero"
    if quad_arg == "invcov":
        quad = ms.inverse_covariance(ridge)
    elif quad_arg == "identity":
        quad = np.eye(n)
    elif quad_arg == "zero":
        quad = np.zeros((n, n))
    else:
        quad = parse_matrix_field(inline_or_path(quad_arg), "--quad", None)
    lin = (
        parse_vector_field(inline_or_path(args.lin), "--lin", None)
        if args.lin
        else np.zeros(n)
    )
    return QuadraticLoss(quad, lin, float(args.const))


class CvarHandler(CommandHandler):
    command = "cvar"

    def handle(self, args: argparse.Namespace) -> int:
        if args.eps is None:
            raise ConfigError("--eps is required")
        level = RiskLevel(args.eps)
        ms = moments_from_args(args, self.config.data_ridge)
        loss = build_loss(args, ms, self.config.covariance_ridge)
        solution = solve_wc_cvar(loss, ms, level, self.config)
        result = {"value": solution.value, "beta": solution.beta, "epsilon": level.epsilon}
        self.emit(result)
        if args.out:
            path = Path(args.out) / "cvar.json"
            write_json(path, {**result, "solver": solution.report.to_dict()})
            self.write_manifest(args.out, {"args": arguments(args)}, self.config.seed, [path])
        self.count("ok")
        self.logger.info("Worst-case CVaR computed", extra=result)
        return EXIT_OK
