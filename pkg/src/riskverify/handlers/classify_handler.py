"""``riskverify classify``: classification robustness statistics."""

from __future__ import annotations

import argparse

from riskverify.applications.classification import (
    parse_classification_config,
    run_classification_experiment,
)
from riskverify.applications.common import config_base, load_json_config
from riskverify.handlers.base import EXIT_OK, CommandHandler, arguments

DEFAULT_CONFIG = "bundled:classification.json"
DEFAULT_OUT = "out/classify"


class ClassifyHandler(CommandHandler):
    command = "classify"

    def handle(self, args: argparse.Namespace) -> int:
        source = args.config or DEFAULT_CONFIG
        data = load_json_config(source)
        if args.seed is not None:
            data["seed"] = args.seed
        if args.samples:
            data["samples"] = args.samples
        if args.eps is not None:
            data["epsilon"] = args.eps
        cfg = parse_classification_config(data, config_base(source), self.config)

        report = run_classification_experiment(cfg, self.config)
        out = args.out or DEFAULT_OUT
        outputs = report.write(out)
        self.write_manifest(out, {"args": arguments(args), "config": data}, cfg.seed, outputs)

        self.emit(
            {
                "out": str(out),
                "class": report.class_index,
                "status": report.certificate.status.value,
                "positive_ratio": {f.family: f.stats.positive_ratio for f in report.families},
            }
        )
        self.count("ok")
        return EXIT_OK
