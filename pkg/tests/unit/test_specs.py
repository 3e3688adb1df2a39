"""Tests for input-set and safety-spec descriptions."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from riskverify.errors import ConfigError, InvalidClassIndex, ParseError
from riskverify.qc import (
    ClassificationMode,
    SafetyProvenance,
    load_input_spec,
    load_safety_spec,
    read_spec_file,
    validate_input_spec,
    validate_safety_spec,
)
from riskverify.risk import MomentSet


class TestValidation:
    """Tests for the structural validators."""

    @pytest.mark.parametrize(
        ("data", "fragment"),
        [
            ({"type": "sphere"}, "type must be one of"),
            ({"type": "confidence"}, "numeric level"),
            ({"type": "ball", "radius_sq": "big"}, "radius_sq"),
            ({"type": "polytope", "faces": []}, "non-empty faces"),
            ({"type": "polytope", "faces": [{"normal": [1, 0]}]}, "faces[0]"),
        ],
    )
    def test_invalid_input_specs(self, data: dict, fragment: str) -> None:
        """Test that each malformed input set yields a message."""
        error = validate_input_spec(data)
        assert error is not None
        assert fragment in error

    def test_valid_input_spec(self) -> None:
        """Test that a well-formed description passes."""
        assert validate_input_spec({"type": "halfspace", "normal": [1, 0], "offset": 2}) is None

    @pytest.mark.parametrize(
        ("data", "fragment"),
        [
            ({"type": "classification", "class": True}, "integer class"),
            ({"type": "classification", "class": 0, "mode": "joint"}, "mode must be one of"),
            ({"type": "constant"}, "numeric value"),
            ({"type": "ellipsoid"}, "requires shape"),
        ],
    )
    def test_invalid_safety_specs(self, data: dict, fragment: str) -> None:
        """Test that each malformed safety spec yields a message."""
        error = validate_safety_spec(data)
        assert error is not None
        assert fragment in error


class TestLoadInputSpec:
    """Tests for load_input_spec."""

    def test_ellipsoid(self, quarter_moments: MomentSet) -> None:
        """Test that the default input set is the risk ellipsoid."""
        spec = load_input_spec({"type": "ellipsoid"}, quarter_moments, 0.5)
        assert len(spec.qcs) == 1
        assert spec.qcs[0].radius_sq == pytest.approx(4.0)
        assert spec.risk_checked

    def test_ball_is_not_risk_checked(self, quarter_moments: MomentSet) -> None:
        """Test that norm-bounded sets skip the admissibility check."""
        spec = load_input_spec({"type": "ball", "radius_sq": 2.0}, quarter_moments, 0.5)
        assert not spec.risk_checked

    def test_polytope(self, unit_moments: MomentSet) -> None:
        """Test one QC per face."""
        data = {
            "type": "polytope",
            "faces": [{"normal": [1, 0], "offset": 5}, {"normal": [0, 1], "offset": 5}],
        }
        spec = load_input_spec(data, unit_moments, 0.5)
        assert len(spec.qcs) == 2
        assert all(qc.satisfied for qc in spec.qcs)

    def test_custom_matrix_size(self, unit_moments: MomentSet) -> None:
        """Test that a custom matrix must be (n+1)×(n+1)."""
        with pytest.raises(ParseError, match="matrix"):
            load_input_spec({"type": "custom", "matrix": [[1.0]]}, unit_moments, 0.5)

    def test_invalid_names_path(self, unit_moments: MomentSet) -> None:
        """Test that the file path prefixes the validation message."""
        with pytest.raises(ConfigError, match="input.json"):
            load_input_spec({"type": "cube"}, unit_moments, 0.5, path="input.json")


class TestLoadSafetySpec:
    """Tests for load_safety_spec."""

    def test_ellipsoid_on_outputs(self) -> None:
        """Test the default output map [0 | I]."""
        spec = load_safety_spec({"type": "ellipsoid", "shape": [[4.0]]}, 2, 1)
        qc = spec.qcs[0]
        assert qc.provenance is SafetyProvenance.ELLIPSOID
        assert qc.S[2, 2] == pytest.approx(0.25)
        assert qc.S[3, 3] == -1.0

    def test_output_map_width(self) -> None:
        """Test that output_map must act on [x; f]."""
        data = {"type": "ellipsoid", "shape": [[1.0]], "output_map": [[1.0, 0.0]]}
        with pytest.raises(ParseError, match="output_map"):
            load_safety_spec(data, 2, 1)

    def test_classification(self) -> None:
        """Test that per-hyperplane classification yields one QC per rival."""
        spec = load_safety_spec({"type": "classification", "class": 1}, 2, 3)
        assert spec.class_index == 1
        assert spec.mode is ClassificationMode.PER_HYPERPLANE
        assert [qc.details["rival"] for qc in spec.qcs] == [0, 2]

    def test_classification_out_of_range(self) -> None:
        """Test that the class must exist."""
        with pytest.raises(InvalidClassIndex):
            load_safety_spec({"type": "classification", "class": 3}, 2, 3)

    def test_constant(self) -> None:
        """Test the constant spec."""
        spec = load_safety_spec({"type": "constant", "value": -1}, 2, 1)
        np.testing.assert_allclose(spec.qcs[0].evaluate([[1.0, 1.0]], [[1.0]]), [-1.0])


class TestReadSpecFile:
    """Tests for read_spec_file."""

    def test_reads_object(self, tmp_path: Path) -> None:
        """Test a plain JSON object."""
        path = tmp_path / "spec.json"
        path.write_text('{"type": "ellipsoid"}')
        assert read_spec_file(path) == {"type": "ellipsoid"}

    def test_rejects_list(self, tmp_path: Path) -> None:
        """Test that the top level must be an object."""
        path = tmp_path / "spec.json"
        path.write_text("[1, 2]")
        with pytest.raises(ParseError, match="top level"):
            read_spec_file(path)
