"""Run manifests: what was run, with which settings, and how long the solves took."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from riskverify import __version__
from riskverify.formatters.report_formatter import to_jsonable, write_json
from riskverify.metrics import get_metrics

MANIFEST_NAME = "manifest.json"

# Numerical outputs of two runs with the same config and seed agree to this tolerance.
DETERMINISM_TOLERANCE = 1e-9


def config_hash(payload: Any) -> str:
    """SHA-256 of the canonical JSON form of ``payload``."""
    canonical = json.dumps(to_jsonable(payload), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def solve_timings() -> dict[str, list[float]]:
    """Per-solve wall-clock seconds keyed by program, from the metrics registry."""
    histogram = get_metrics().histogram("solve_seconds", "Wall-clock seconds per conic solve")
    return histogram.observations()


@dataclass
class RunManifest:
    """One per output directory."""

    command: str
    config_hash: str
    seed: int
    version: str
    wall_clock_seconds: float
    solve_timings: dict[str, list[float]]
    settings: dict[str, Any] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    determinism: dict[str, Any] = field(
        default_factory=lambda: {
            "tolerance": DETERMINISM_TOLERANCE,
            "note": (
                "CSV and JSON outputs are byte-identical for identical config and seed "
                "when the solver is deterministic; otherwise numbers agree to the tolerance"
            ),
        }
    )

    @classmethod
    def build(
        cls,
        command: str,
        payload: dict[str, Any],
        seed: int,
        started: float,
        settings: dict[str, Any] | None = None,
        outputs: list[Path] | None = None,
    ) -> RunManifest:
        """Assemble a manifest; ``started`` is a ``time.perf_counter()`` reading."""
        return cls(
            command=command,
            config_hash=config_hash(payload),
            seed=seed,
            version=__version__,
            wall_clock_seconds=time.perf_counter() - started,
            solve_timings=solve_timings(),
            settings=dict(settings or {}),
            outputs=sorted(str(p) for p in outputs or []),
        )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def write(self, out_dir: str | Path) -> Path:
        path = Path(out_dir) / MANIFEST_NAME
        write_json(path, self.to_dict())
        return path
