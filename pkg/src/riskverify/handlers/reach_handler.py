"""``riskverify reach``: closed-loop reachable sets over an ε sweep."""

from __future__ import annotations

import argparse

from riskverify.applications.common import config_base, load_json_config
from riskverify.applications.reachability import (
    parse_reachability_config,
    run_reachability_experiment,
)
from riskverify.handlers.base import EXIT_OK, CommandHandler, arguments

DEFAULT_CONFIG = "bundled:reachability.json"
DEFAULT_OUT = "out/reach"


class ReachHandler(CommandHandler):
    command = "reach"

    def handle(self, args: argparse.Namespace) -> int:
        source = args.config or DEFAULT_CONFIG
        data = load_json_config(source)
        if args.seed is not None:
            data["seed"] = args.seed
        if args.mode:
            data["input_mode"] = args.mode
        if args.samples:
            data["samples"] = args.samples
        cfg = parse_reachability_config(data, config_base(source), self.config)

        report = run_reachability_experiment(cfg, self.config)
        out = args.out or DEFAULT_OUT
        outputs = report.write(out)
        self.write_manifest(out, {"args": arguments(args), "config": data}, cfg.seed, outputs)

        summary = {
            "out": str(out),
            "mode": cfg.mode.value,
            "ellipsoids": [
                {
                    "epsilon": r.epsilon,
                    "status": r.certificate.status.value,
                    "log_det": None if r.ellipsoid is None else r.ellipsoid.log_det,
                }
                for r in report.results
            ],
        }
        self.emit(summary)
        self.count("ok")
        return EXIT_OK
