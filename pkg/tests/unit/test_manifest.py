"""Tests for run manifests."""

from __future__ import annotations

import json
import time
from pathlib import Path

from riskverify import __version__
from riskverify.manifest import DETERMINISM_TOLERANCE, RunManifest, config_hash, solve_timings
from riskverify.metrics import get_metrics


class TestConfigHash:
    """Tests for config_hash."""

    def test_key_order_does_not_matter(self) -> None:
        """Test that the hash uses a canonical form."""
        assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})

    def test_values_matter(self) -> None:
        """Test that different settings hash differently."""
        assert config_hash({"seed": 0}) != config_hash({"seed": 1})


class TestRunManifest:
    """Tests for RunManifest."""

    def test_build(self) -> None:
        """Test the recorded fields."""
        histogram = get_metrics().histogram("solve_seconds", "")
        histogram.labels(program="verify").observe(0.25)

        manifest = RunManifest.build(
            "verify",
            {"args": {"eps": 0.2}},
            seed=7,
            started=time.perf_counter(),
            outputs=[Path("b.csv"), Path("a.json")],
        )

        assert manifest.version == __version__
        assert manifest.seed == 7
        assert manifest.outputs == ["a.json", "b.csv"]
        assert manifest.solve_timings == {"program=verify": [0.25]}
        assert manifest.wall_clock_seconds >= 0.0
        assert manifest.determinism["tolerance"] == DETERMINISM_TOLERANCE

    def test_write(self, tmp_path: Path) -> None:
        """Test that the manifest lands in manifest.json."""
        manifest = RunManifest.build("reach", {}, 0, time.perf_counter())
        path = manifest.write(tmp_path / "run")

        assert path == tmp_path / "run" / "manifest.json"
        data = json.loads(path.read_text())
        assert data["command"] == "reach"
        assert data["config_hash"] == config_hash({})

    def test_no_solves(self) -> None:
        """Test that a run without solves records no timings."""
        assert solve_timings() == {}
