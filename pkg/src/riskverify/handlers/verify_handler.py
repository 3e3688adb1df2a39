"""``riskverify verify``: certify one safety spec for one network."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from riskverify.applications.common import (
    config_base,
    load_json_config,
    parse_moments,
    parse_network,
    resolve_path,
)
from riskverify.errors import ConfigError
from riskverify.formatters.report_formatter import write_json
from riskverify.handlers.base import (
    EXIT_OK,
    EXIT_UNDETERMINED,
    CommandHandler,
    arguments,
    moments_from_args,
)
from riskverify.qc.specs import load_input_spec, load_safety_spec, read_spec_file
from riskverify.risk import RiskLevel
from riskverify.verifier import (
    Certificate,
    ClassificationCertificate,
    verify,
    verify_classification,
)


def _spec(value: Any, base: Path | None, name: str) -> dict[str, Any]:
    if isinstance(value, str):
        return read_spec_file(resolve_path(value, base))
    if isinstance(value, dict):
        return value
    raise ConfigError(f"{name} must be a spec object or a file name")


class VerifyHandler(CommandHandler):
    command = "verify"

    def handle(self, args: argparse.Namespace) -> int:
        data: dict[str, Any] = load_json_config(args.config) if args.config else {}
        base = config_base(args.config) if args.config else None

        network = args.network or data.get("network")
        if network is None:
            raise ConfigError("a network is required (--network or config)")
        net = parse_network(network, None if args.network else base)

        if args.mean or args.cov or args.data:
            ms = moments_from_args(args, self.config.data_ridge)
        elif "moments" in data:
            ms = parse_moments(data["moments"], base, self.config.data_ridge)
        else:
            raise ConfigError("moments are required (--mean/--cov, --data or config)")

        eps_value = args.eps if args.eps is not None else data.get("epsilon")
        if eps_value is None:
            raise ConfigError("a risk level is required (--eps or config)")
        level = RiskLevel(float(eps_value))

        input_data = read_spec_file(args.input) if args.input else data.get("input")
        safety_data = read_spec_file(args.safety) if args.safety else data.get("safety")
        if input_data is None or safety_data is None:
            raise ConfigError("input and safety specs are required")
        input_spec = load_input_spec(_spec(input_data, base, "input"), ms, level, self.config)
        safety_spec = load_safety_spec(
            _spec(safety_data, base, "safety"), net.input_dim, net.output_dim
        )

        result: Certificate | ClassificationCertificate
        if safety_spec.class_index is not None and safety_spec.mode is not None:
            result = verify_classification(
                net,
                input_spec.qcs,
                safety_spec.class_index,
                ms,
                level,
                safety_spec.mode,
                self.config,
                check_input=input_spec.risk_checked,
            )
        else:
            if len(safety_spec.qcs) != 1:
                raise ConfigError("safety spec must describe exactly one output QC")
            result = verify(
                net,
                input_spec.qcs,
                safety_spec.qcs[0],
                ms,
                level,
                self.config,
                check_input=input_spec.risk_checked,
            )

        document = {"input": input_spec.kind, "safety": safety_spec.kind, **result.to_dict()}
        self.emit(document)
        if args.out:
            path = Path(args.out) / "certificate.json"
            write_json(path, document)
            payload = {"args": arguments(args), "config": data}
            self.write_manifest(args.out, payload, self.config.seed, [path])

        status = result.status.value
        self.count(status)
        self.logger.info("Verify finished", extra={"status": status, "epsilon": level.epsilon})
        return EXIT_OK if result.certified else EXIT_UNDETERMINED
