"""Tests for the subcommand handlers."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from riskverify.app import build_parser
from riskverify.config import Config
from riskverify.errors import ConfigError
from riskverify.handlers import (
    EXIT_OK,
    EXIT_UNDETERMINED,
    CvarHandler,
    SampleHandler,
    VerifyHandler,
)
from riskverify.handlers.base import arguments, inline_or_path, moments_from_args
from riskverify.handlers.sample_handler import parse_params
from riskverify.metrics import get_metrics

QUARTER = ["--mean", "[0, 0]", "--cov", "[[0.25, 0], [0, 0.25]]"]


def _verify_config(tmp_path: Path, value: float) -> Path:
    path = tmp_path / "verify.json"
    path.write_text(
        json.dumps(
            {
                "network": "bundled:controller_2_3_1.json",
                "moments": {"mean": [0.0, 0.0], "covariance": [[0.25, 0.0], [0.0, 0.25]]},
                "epsilon": 0.5,
                "input": {"type": "ellipsoid"},
                "safety": {"type": "constant", "value": value},
            }
        )
    )
    return path


class TestHelpers:
    """Tests for the argument helpers."""

    def test_parse_params(self) -> None:
        """Test key=value pairs."""
        assert parse_params(["df=3", " alpha = 2.5"]) == {"df": 3.0, "alpha": 2.5}
        assert parse_params(None) == {}

    @pytest.mark.parametrize("item", ["df", "df=three"])
    def test_parse_params_errors(self, item: str) -> None:
        """Test missing separators and non-numeric values."""
        with pytest.raises(ConfigError, match="--param"):
            parse_params([item])

    def test_inline_array(self) -> None:
        """Test that bracketed values are decoded and others kept as paths."""
        assert inline_or_path(" [1, 2] ") == [1, 2]
        assert inline_or_path("mean.csv") == "mean.csv"
        with pytest.raises(ConfigError, match="inline array"):
            inline_or_path("[1, 2")

    def test_moments_need_mean_and_cov(self) -> None:
        """Test that moments without --cov are rejected."""
        args = build_parser().parse_args(["cvar", "--mean", "[0, 0]", "--eps", "0.5"])
        with pytest.raises(ConfigError, match="--cov"):
            moments_from_args(args, 1e-6)

    def test_arguments_drop_dispatch_and_out(self) -> None:
        """Test that the hashed arguments skip the handler class and the output dir."""
        args = build_parser().parse_args(["reach", "--out", "somewhere", "--seed", "3"])
        recorded = arguments(args)
        assert "handler" not in recorded
        assert "out" not in recorded
        assert recorded["seed"] == 3


class TestCvarHandler:
    """Tests for CvarHandler."""

    def test_inverse_covariance_loss(
        self, config: Config, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Test n/ε = 4 for Π = Σ⁻¹ at ε = 0.5."""
        args = build_parser().parse_args(["cvar", *QUARTER, "--quad", "invcov", "--eps", "0.5"])
        assert CvarHandler(config).handle(args) == EXIT_OK

        result = json.loads(capsys.readouterr().out)
        assert result["value"] == pytest.approx(4.0, abs=1e-5)
        assert result["epsilon"] == 0.5

    def test_writes_output(self, config: Config, tmp_path: Path) -> None:
        """Test cvar.json and the manifest under --out."""
        args = build_parser().parse_args(
            ["cvar", *QUARTER, "--const", "3", "--eps", "0.2", "--out", str(tmp_path)]
        )
        CvarHandler(config).handle(args)

        assert json.loads((tmp_path / "cvar.json").read_text())["value"] == pytest.approx(3.0)
        assert json.loads((tmp_path / "manifest.json").read_text())["command"] == "cvar"

    def test_missing_eps(self, config: Config) -> None:
        """Test that --eps is required."""
        args = build_parser().parse_args(["cvar", *QUARTER])
        with pytest.raises(ConfigError, match="--eps"):
            CvarHandler(config).handle(args)


class TestVerifyHandler:
    """Tests for VerifyHandler."""

    def test_certified(self, config: Config, tmp_path: Path) -> None:
        """Test exit 0 and the written certificate for a safe constant loss."""
        out = tmp_path / "out"
        args = build_parser().parse_args(
            ["verify", "--config", str(_verify_config(tmp_path, -1.0)), "--out", str(out)]
        )
        assert VerifyHandler(config).handle(args) == EXIT_OK

        certificate = json.loads((out / "certificate.json").read_text())
        assert certificate["status"] == "certified"
        assert certificate["input"] == "ellipsoid"
        assert (out / "manifest.json").exists()

    def test_undetermined(self, config: Config, tmp_path: Path) -> None:
        """Test exit 4 for an unsafe constant loss."""
        args = build_parser().parse_args(
            ["verify", "--config", str(_verify_config(tmp_path, 1.0))]
        )
        assert VerifyHandler(config).handle(args) == EXIT_UNDETERMINED

        counter = get_metrics().counter("commands_total", "")
        assert counter.labels(command="verify", status="undetermined").value == 1

    def test_flags_override_config(
        self, config: Config, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Test that --eps replaces the config's risk level."""
        args = build_parser().parse_args(
            ["verify", "--config", str(_verify_config(tmp_path, -1.0)), "--eps", "0.25"]
        )
        assert VerifyHandler(config).handle(args) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["epsilon"] == 0.25

    def test_needs_network(self, config: Config) -> None:
        """Test that a network is required."""
        args = build_parser().parse_args(["verify", *QUARTER, "--eps", "0.5"])
        with pytest.raises(ConfigError, match="network"):
            VerifyHandler(config).handle(args)


class TestSampleHandler:
    """Tests for SampleHandler."""

    def test_stdout(self, config: Config, capsys: pytest.CaptureFixture[str]) -> None:
        """Test one CSV line per sample on stdout."""
        args = build_parser().parse_args(
            ["sample", *QUARTER, "--family", "student_t", "--param", "df=4", "--samples", "5"]
        )
        assert SampleHandler(config).handle(args) == EXIT_OK

        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 5
        assert all(len(line.split(",")) == 2 for line in lines)

    def test_same_seed_same_output(
        self, config: Config, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Test that --seed fixes the stream."""
        argv = ["sample", *QUARTER, "--family", "normal", "--samples", "3", "--seed", "9"]
        SampleHandler(config).handle(build_parser().parse_args(argv))
        first = capsys.readouterr().out
        SampleHandler(config).handle(build_parser().parse_args(argv))
        assert capsys.readouterr().out == first
