"""Integration tests for the bundled case studies."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from riskverify.app import main
from riskverify.applications import (
    FAMILIES,
    parse_reachability_config,
    run_reachability_experiment,
)
from riskverify.applications.common import config_base, load_json_config
from riskverify.config import Config
from riskverify.formatters import read_csv
from riskverify.verifier import Ellipsoid

BUNDLED_REACH = "bundled:reachability.json"


class TestReachPipeline:
    """Tests for ``riskverify reach`` on the bundled closed loop."""

    def test_risk_sweep(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test three certified ellipsoids that bound every sampled successor set."""
        code = main(["reach", "--samples", "5000", "--out", str(tmp_path)])
        assert code == 0

        summary = json.loads(capsys.readouterr().out)
        assert [e["epsilon"] for e in summary["ellipsoids"]] == [0.1, 0.5, 0.9]
        assert all(e["status"] == "certified" for e in summary["ellipsoids"])
        log_dets = [e["log_det"] for e in summary["ellipsoids"]]
        assert log_dets[0] >= log_dets[1] >= log_dets[2]

        rows = read_csv(tmp_path / "stats.csv")
        assert len(rows) == 9
        assert all(row["within_bound"] == "True" for row in rows)

        document = json.loads((tmp_path / "ellipsoids.json").read_text())
        for entry in document["ellipsoids"]:
            assert entry["reverified"] is not None
            shape = Ellipsoid(np.array(entry["ellipsoid"]["shape"]))
            plot = tmp_path / "plotdata" / f"ellipse_eps_{entry['epsilon']:g}.csv"
            boundary = np.array([[float(r["y0"]), float(r["y1"])] for r in read_csv(plot)])
            np.testing.assert_allclose(shape.quadratic(boundary), 0.0, atol=1e-9)

        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["command"] == "reach"
        assert manifest["seed"] == 0
        assert "program=min_volume_ellipsoid" in manifest["solve_timings"]

    def test_confidence_mode_matches_risk_mode(self, tmp_path: Path) -> None:
        """Test that the confidence ellipsoid at p = 1 − ε gives the same sets."""
        assert main(["reach", "--samples", "500", "--out", str(tmp_path / "risk")]) == 0
        assert main(
            ["reach", "--samples", "500", "--mode", "confidence", "--out", str(tmp_path / "conf")]
        ) == 0
        risk = json.loads((tmp_path / "risk" / "ellipsoids.json").read_text())
        confidence = json.loads((tmp_path / "conf" / "ellipsoids.json").read_text())

        assert len(risk["ellipsoids"]) == len(confidence["ellipsoids"]) == 3
        for a, b in zip(risk["ellipsoids"], confidence["ellipsoids"]):
            shape_a = np.array(a["ellipsoid"]["shape"])
            shape_b = np.array(b["ellipsoid"]["shape"])
            assert np.linalg.norm(shape_a - shape_b, "fro") <= 1e-3

    def test_all_families_stay_within_bound(self, config: Config) -> None:
        """Test 100k moment-matched samples of every family against each certified ellipsoid."""
        data = load_json_config(BUNDLED_REACH)
        data.pop("distributions")
        data.update({"samples": 100_000, "plot_samples": 10})
        cfg = parse_reachability_config(data, config_base(BUNDLED_REACH), config)
        report = run_reachability_experiment(cfg, config)

        assert [r.epsilon for r in report.results] == [0.1, 0.5, 0.9]
        checks = [check for result in report.results for check in result.checks]
        assert len(checks) == 18
        assert {check.family.split("(")[0] for check in checks} == set(FAMILIES)
        failing = [
            (c.epsilon, c.family, c.cvar, c.cvar_stderr) for c in checks if not c.within_bound
        ]
        assert failing == []
        assert all(check.n_samples == 100_000 for check in checks)


class TestClassifyPipeline:
    """Tests for ``riskverify classify`` on the bundled blobs."""

    def test_six_families(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test a certified margin with one statistics row and one histogram per family."""
        code = main(["classify", "--samples", "20000", "--out", str(tmp_path)])
        assert code == 0

        summary = json.loads(capsys.readouterr().out)
        assert summary["class"] == 1
        assert summary["status"] == "certified"
        assert len(summary["positive_ratio"]) == 6

        rows = {row["family"].split("(")[0]: row for row in read_csv(tmp_path / "stats.csv")}
        assert len(rows) == 6
        assert len(list((tmp_path / "plotdata").glob("hist_*.csv"))) == 6

        ratio = {family: float(row["positive_ratio"]) for family, row in rows.items()}
        cvar = {family: float(row["cvar_0.2"]) for family, row in rows.items()}
        assert ratio["normal"] >= ratio["student_t"]
        assert min(cvar, key=cvar.__getitem__) == "student_t"

        certificate = json.loads((tmp_path / "certificate.json").read_text())
        assert certificate["certificate"]["rivals"] == [0, 2]
        assert certificate["accuracy"] > 0.99
