"""Tests for network weight files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from riskverify.errors import ParseError, UnsupportedActivation
from riskverify.network import Network, load_network, network_from_dict, save_network


class TestNetworkFiles:
    """Tests for loading and saving networks."""

    def test_save_then_load(self, random_net: Network, tmp_path: Path) -> None:
        """Test that weights survive a save and load bit for bit."""
        path = tmp_path / "net.json"
        save_network(random_net, path)
        loaded = load_network(path)

        for before, after in zip([*random_net.layers, random_net.output],
                                 [*loaded.layers, loaded.output]):
            assert np.array_equal(before.weights, after.weights)
            assert np.array_equal(before.bias, after.bias)

    def test_metadata_is_kept(self, controller: Network) -> None:
        """Test that the bundled controller carries its metadata."""
        assert controller.metadata["method"] == "relu_split"

    def test_mismatched_layer_names_offender(self, tmp_path: Path) -> None:
        """Test that an inconsistent output layer is named in the error."""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({
            "layers": [{"weights": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0]}],
            "output": {"weights": [[1.0, 1.0, 1.0]], "bias": [0.0]},
        }))

        with pytest.raises(ParseError) as info:
            load_network(path)
        assert info.value.field == "output"
        assert str(path) in str(info.value)

    def test_tanh_is_unsupported(self) -> None:
        """Test that a non-relu activation is rejected."""
        data = {
            "activation": "tanh",
            "layers": [{"weights": [[1.0]], "bias": [0.0]}],
            "output": {"weights": [[1.0]], "bias": [0.0]},
        }
        with pytest.raises(UnsupportedActivation):
            network_from_dict(data)

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that an unreadable file is a ParseError naming the path."""
        with pytest.raises(ParseError, match="missing.json"):
            load_network(tmp_path / "missing.json")

    def test_invalid_json_reports_line(self, tmp_path: Path) -> None:
        """Test that JSON syntax errors carry a line number."""
        path = tmp_path / "broken.json"
        path.write_text('{\n"layers": [\n')

        with pytest.raises(ParseError) as info:
            load_network(path)
        assert info.value.line is not None

    def test_ragged_weights(self) -> None:
        """Test that ragged arrays are rejected."""
        data = {
            "layers": [{"weights": [[1.0, 2.0], [3.0]], "bias": [0.0, 0.0]}],
            "output": {"weights": [[1.0, 1.0]], "bias": [0.0]},
        }
        with pytest.raises(ParseError, match=r"layers\[0\]"):
            network_from_dict(data)
