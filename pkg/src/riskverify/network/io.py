"""JSON weight files.

Format::

    {"activation": "relu",
     "layers": [{"weights": [[...]], "bias": [...]}, ...],
     "output": {"weights": [[...]], "bias": [...]},
     "metadata": {...}}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from riskverify.errors import DimensionMismatch, ParseError, UnsupportedActivation
from riskverify.logging import get_logger
from riskverify.network.model import SUPPORTED_ACTIVATIONS, DenseLayer, Network

logger = get_logger("network.io")


def _parse_layer(raw: Any, field: str, path: str) -> DenseLayer:
    if not isinstance(raw, dict) or "weights" not in raw or "bias" not in raw:
        raise ParseError("expected an object with 'weights' and 'bias'", path=path, field=field)
    try:
        weights = np.asarray(raw["weights"], dtype=float)
        bias = np.asarray(raw["bias"], dtype=float)
    except (TypeError, ValueError) as e:
        raise ParseError(f"non-numeric or ragged array ({e})", path=path, field=field) from e
    if weights.ndim != 2:
        raise ParseError("weights must be a 2-D nested array", path=path, field=f"{field}.weights")
    if bias.ndim != 1:
        raise ParseError("bias must be a flat array", path=path, field=f"{field}.bias")
    try:
        return DenseLayer(weights, bias)
    except DimensionMismatch as e:
        raise ParseError(str(e), path=path, field=field) from e


def network_from_dict(data: Any, path: str = "<memory>") -> Network:
    """Build a Network from the decoded JSON structure."""
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object", path=path)
    activation = data.get("activation", "relu")
    if activation not in SUPPORTED_ACTIVATIONS:
        raise UnsupportedActivation(
            f"unsupported activation {activation!r}", path=path, field="activation"
        )
    raw_layers = data.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise ParseError("'layers' must be a non-empty list", path=path, field="layers")
    if "output" not in data:
        raise ParseError("missing 'output' layer", path=path, field="output")

    layers = [_parse_layer(raw, f"layers[{k}]", path) for k, raw in enumerate(raw_layers)]
    output = _parse_layer(data["output"], "output", path)

    chain = [*layers, output]
    for k in range(1, len(chain)):
        if chain[k].in_dim != chain[k - 1].out_dim:
            field = "output" if k == len(layers) else f"layers[{k}]"
            raise ParseError(
                f"expects {chain[k].in_dim} inputs but the previous layer "
                f"produces {chain[k - 1].out_dim}",
                path=path,
                field=field,
            )

    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError("'metadata' must be an object", path=path, field="metadata")
    return Network(tuple(layers), output, activation=activation, metadata=metadata)


def network_to_dict(net: Network) -> dict[str, Any]:
    """JSON-compatible representation; floats keep full precision via repr."""
    def layer(dense: DenseLayer) -> dict[str, Any]:
        return {"weights": dense.weights.tolist(), "bias": dense.bias.tolist()}

    data: dict[str, Any] = {
        "activation": net.activation,
        "layers": [layer(dense) for dense in net.layers],
        "output": layer(net.output),
    }
    if net.metadata:
        data["metadata"] = net.metadata
    return data


def load_network(path: str | Path) -> Network:
    """Load a network weight file.

    Raises:
        ParseError: On unreadable files, invalid JSON or inconsistent layers.
        UnsupportedActivation: For activations other than relu.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read file ({e.strerror})", path=str(path)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=str(path), line=e.lineno) from e
    net = network_from_dict(data, str(path))
    logger.debug(
        "Loaded network",
        extra={"path": str(path), "widths": [net.input_dim, *net.hidden_widths, net.output_dim]},
    )
    return net


def save_network(net: Network, path: str | Path) -> None:
    """Write a network weight file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(network_to_dict(net), indent=2) + "\n")
