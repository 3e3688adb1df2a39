"""Command-line entry point for riskverify."""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

from dotenv import load_dotenv

from riskverify import __version__
from riskverify.applications.distributions import FAMILIES
from riskverify.applications.reachability import InputMode
from riskverify.config import SUPPORTED_SOLVERS, Config
from riskverify.errors import RiskVerifyError, SolverError
from riskverify.handlers import (
    EXIT_CONFIG,
    EXIT_SOLVER,
    ClassifyHandler,
    CommandHandler,
    CvarHandler,
    ReachHandler,
    SampleHandler,
    VerifyHandler,
)
from riskverify.logging import configure_logging, get_logger


def _global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="JSON experiment config (or bundled:<name>)")
    parent.add_argument("--seed", type=int, help="Base random seed")
    parent.add_argument("--out", help="Output directory")
    parent.add_argument("--jobs", type=int, help="Worker threads for independent solves")
    parent.add_argument("--tol-feas", type=float, help="Feasibility tolerance")
    parent.add_argument("--tol-psd", type=float, help="PSD margin for certification")
    parent.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    parent.add_argument("--solver", choices=sorted(SUPPORTED_SOLVERS), help="Conic solver")
    parent.add_argument(
        "--pairwise",
        action="store_const",
        const=True,
        default=None,
        help="Add pairwise cross multipliers to the activation QC",
    )
    return parent


def _moment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mean", help="Mean vector file or inline JSON array")
    parser.add_argument("--cov", help="Covariance matrix file or inline JSON array")
    parser.add_argument("--data", help="Sample matrix file; moments are estimated from it")


def build_parser() -> argparse.ArgumentParser:
    """Parser for all subcommands."""
    parent = _global_flags()
    parser = argparse.ArgumentParser(
        prog="riskverify",
        description="Risk-aware verification of ReLU networks under moment ambiguity",
    )
    parser.add_argument("--version", action="version", version=f"riskverify {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cvar = sub.add_parser("cvar", parents=[parent], help="Worst-case CVaR of a quadratic loss")
    _moment_flags(cvar)
    cvar.add_argument("--quad", help="Π: file, inline array, or invcov/identity/zero")
    cvar.add_argument("--lin", help="θ: file or inline array (default zero)")
    cvar.add_argument("--const", type=float, default=0.0, help="ρ (default 0)")
    cvar.add_argument("--eps", type=float, help="Risk level ε in (0,1)")
    cvar.set_defaults(handler=CvarHandler)

    verify = sub.add_parser("verify", parents=[parent], help="Certify a safety spec")
    _moment_flags(verify)
    verify.add_argument("--network", help="Network JSON file")
    verify.add_argument("--input", help="Input spec JSON file")
    verify.add_argument("--safety", help="Safety spec JSON file")
    verify.add_argument("--eps", type=float, help="Risk level ε in (0,1)")
    verify.set_defaults(handler=VerifyHandler)

    reach = sub.add_parser("reach", parents=[parent], help="Closed-loop reachable sets")
    reach.add_argument("--mode", choices=[m.value for m in InputMode], help="Input-set mode")
    reach.add_argument("--samples", type=int, help="Samples per distribution family")
    reach.set_defaults(handler=ReachHandler)

    classify = sub.add_parser("classify", parents=[parent], help="Classification robustness")
    classify.add_argument("--samples", type=int, help="Samples per distribution family")
    classify.add_argument("--eps", type=float, help="Risk level ε in (0,1)")
    classify.set_defaults(handler=ClassifyHandler)

    sample = sub.add_parser("sample", parents=[parent], help="Moment-matched samples")
    _moment_flags(sample)
    sample.add_argument("--family", required=True, choices=sorted(FAMILIES))
    sample.add_argument("--param", action="append", help="Family parameter as key=value")
    sample.add_argument("--samples", type=int, help="Number of samples (default 1000)")
    sample.set_defaults(handler=SampleHandler)

    return parser


def load_config(args: argparse.Namespace) -> Config:
    """Environment configuration with CLI overrides applied."""
    return Config.from_env().with_overrides(
        seed=args.seed,
        jobs=args.jobs,
        tol_feas=args.tol_feas,
        tol_psd=args.tol_psd,
        log_level=args.log_level,
        solver=args.solver,
        pairwise_multipliers=args.pairwise,
    )


def run(args: argparse.Namespace) -> int:
    """Dispatch parsed arguments and map failures to exit codes."""
    try:
        config = load_config(args)
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_CONFIG

    configure_logging(level=config.log_level, json_format=config.log_json)
    logger = get_logger("app")
    handler: CommandHandler = args.handler(config)
    try:
        return handler.handle(args)
    except SolverError as e:
        handler.count("solver_error")
        logger.error("Solver failed", extra={"command": handler.command, "error": str(e)})
        sys.stderr.write(f"error: {e}\n")
        return EXIT_SOLVER
    except (RiskVerifyError, ValueError, OSError) as e:
        handler.count("invalid")
        logger.error("Command failed", extra={"command": handler.command, "error": str(e)})
        sys.stderr.write(f"error: {e}\n")
        return EXIT_CONFIG


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code."""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(e.code or 0)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
