"""Tests for the classification robustness pipeline."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
import pytest

from riskverify.applications import (
    margin_stats,
    margins,
    parse_classification_config,
    run_classification_experiment,
    synthetic_classes,
)
from riskverify.applications.common import config_base, load_json_config
from riskverify.config import Config
from riskverify.errors import ConfigError, EmptyInput, InvalidClassIndex, InvalidParameter
from riskverify.formatters import read_csv, write_matrix

BUNDLED = "bundled:classification.json"


def _small(**changes: Any) -> dict[str, Any]:
    data = load_json_config(BUNDLED)
    data.update({"samples": 2000, "bins": 10})
    data["distributions"] = [{"family": "normal"}, {"family": "student_t", "df": 3}]
    data.update(changes)
    return data


class TestMargins:
    """Tests for margins and margin_stats."""

    def test_margin_against_best_rival(self) -> None:
        """Test P_diff = f_c − max over the other classes."""
        scores = [[1.0, 3.0, 2.0], [0.0, -1.0, 4.0]]
        np.testing.assert_allclose(margins(scores, 1), [1.0, -5.0])
        np.testing.assert_allclose(margins(scores, 0), [-2.0, -4.0])

    def test_class_out_of_range(self) -> None:
        """Test that the class must exist."""
        with pytest.raises(InvalidClassIndex):
            margins([[1.0, 2.0]], 2)

    def test_stats(self) -> None:
        """Test the summary of four margins at ε = 0.5."""
        stats = margin_stats([1.0, 2.0, 3.0, 4.0], 0.5)

        assert stats.mean == pytest.approx(2.5)
        assert stats.median == pytest.approx(2.5)
        assert stats.std_dev == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
        assert stats.positive_ratio == 1.0
        assert stats.cvar == pytest.approx(1.5)

    def test_all_margins_above_one(self) -> None:
        """Test that margins ≥ 1 give a lower-tail CVaR ≥ 1."""
        values = 1.0 + np.random.default_rng(0).exponential(size=500)
        stats = margin_stats(values, 0.1)
        assert stats.positive_ratio == 1.0
        assert stats.cvar >= 1.0

    def test_cvar_at_other_level(self) -> None:
        """Test that stats answer only for their own ε."""
        stats = margin_stats([1.0, 2.0], 0.5)
        assert stats.cvar_at(0.5) == stats.cvar
        with pytest.raises(InvalidParameter):
            stats.cvar_at(0.2)

    def test_empty(self) -> None:
        """Test that no margins is an error."""
        with pytest.raises(EmptyInput):
            margin_stats([], 0.5)


class TestSyntheticClasses:
    """Tests for synthetic_classes."""

    def test_shapes_and_labels(self) -> None:
        """Test three blobs of equal size."""
        data, labels = synthetic_classes(per_class=50, seed=1)
        assert data.shape == (150, 2)
        assert np.bincount(labels).tolist() == [50, 50, 50]

    def test_invalid_std(self) -> None:
        """Test that the spread must be positive."""
        with pytest.raises(InvalidParameter):
            synthetic_classes(std=0.0)


class TestClassificationConfig:
    """Tests for parse_classification_config."""

    def test_bundled_config(self, config: Config) -> None:
        """Test the bundled experiment: band classifier, class 1 moments near the middle blob."""
        cfg = parse_classification_config(load_json_config(BUNDLED), config_base(BUNDLED), config)

        assert cfg.class_index == 1
        assert cfg.epsilon == 0.2
        assert len(cfg.distributions) == 6
        np.testing.assert_allclose(cfg.moments.mean, [0.0, 0.0], atol=0.1)
        np.testing.assert_allclose(cfg.moments.covariance, 0.25 * np.eye(2), atol=0.06)

    @pytest.mark.parametrize(
        ("changes", "fragment"),
        [
            ({"class": "1"}, "class must be an integer"),
            ({"epsilon": None}, "epsilon"),
            ({"mode": "joint"}, "mode"),
            ({"samples": -1}, "samples"),
        ],
    )
    def test_invalid(self, config: Config, changes: dict[str, Any], fragment: str) -> None:
        """Test that each malformed setting is reported."""
        with pytest.raises(ConfigError, match=fragment):
            parse_classification_config(_small(**changes), config_base(BUNDLED), config)

    def test_class_beyond_outputs(self, config: Config) -> None:
        """Test that the class must be one of the network's outputs."""
        with pytest.raises(InvalidClassIndex):
            parse_classification_config(_small(**{"class": 3}), config_base(BUNDLED), config)

    def test_data_file(self, config: Config, tmp_path: Path) -> None:
        """Test features plus a final label column read from CSV."""
        data, labels = synthetic_classes(per_class=40, seed=3)
        write_matrix(tmp_path / "points.csv", np.column_stack([data, labels]))
        raw = _small(data_file="points.csv")
        raw.pop("synthetic")

        cfg = parse_classification_config(raw, tmp_path, config)
        assert cfg.data.shape == (120, 2)
        assert cfg.labels.tolist() == labels.tolist()


class TestClassificationPipeline:
    """Tests for run_classification_experiment."""

    def test_small_run(self, config: Config, tmp_path: Path) -> None:
        """Test two families end to end and the written artifacts."""
        cfg = parse_classification_config(_small(), config_base(BUNDLED), config)
        report = run_classification_experiment(cfg, config)

        assert report.rivals == [0, 2]
        assert report.extras["accuracy"] > 0.99
        assert len(report.certificate.certificates) == 2
        normal = report.families[0]
        assert normal.family == "normal"
        assert 0.0 <= normal.stats.positive_ratio <= 1.0
        assert int(normal.histogram[0].sum()) == 2000

        report.write(tmp_path)
        rows = read_csv(tmp_path / "stats.csv")
        assert [row["family"] for row in rows] == ["normal", "student_t(df=3)"]
        assert set(rows[0]) >= {"positive_ratio", "cvar_0.2", "rival_0_cvar", "rival_2_cvar"}
        assert (tmp_path / "certificate.json").exists()
        assert (tmp_path / "network.json").exists()
        assert (tmp_path / "plotdata" / "hist_student_t_df_3.csv").exists()
