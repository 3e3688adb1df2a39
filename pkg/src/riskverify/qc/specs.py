"""Input-set and safety-spec description files.

Input set::

    {"type": "ellipsoid"}                      risk ellipsoid n/ε of the moment set
    {"type": "confidence", "level": 0.9}       chance-constraint ellipsoid
    {"type": "ball", "radius_sq": 1.0}         norm-bounded, no risk check
    {"type": "halfspace", "normal": [...], "offset": b}
    {"type": "polytope", "faces": [{"normal": [...], "offset": b}, ...]}
    {"type": "custom", "matrix": [[...]]}

Safety spec::

    {"type": "ellipsoid", "shape": [[...]], "output_map": [[...]]}
    {"type": "halfspace", "normal": [...], "offset": b, "output_map": [[...]]}
    {"type": "classification", "class": 1, "mode": "per_hyperplane"}
    {"type": "constant", "value": -1}
    {"type": "custom", "matrix": [[...]]}

``output_map`` defaults to [0 | I], i.e. the network output itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any

from riskverify.errors import ConfigError, DimensionMismatch, ParseError
from riskverify.formatters.matrix_formatter import coerce_matrix, coerce_vector
from riskverify.qc.input import (
    InputGeometry,
    InputQc,
    input_qc_ball,
    input_qc_confidence,
    input_qc_ellipsoid,
    input_qc_halfspace,
    input_qc_polytope,
)
from riskverify.qc.safety import (
    ClassificationMode,
    SafetyProvenance,
    SafetyQc,
    classification_qc,
    output_selector,
    safety_qc_constant,
    safety_qc_ellipsoid,
    safety_qc_output_halfspace,
)
from riskverify.risk import MomentSet, RiskLevel

if TYPE_CHECKING:
    from riskverify.config import Config

INPUT_TYPES = ("ellipsoid", "confidence", "ball", "halfspace", "polytope", "custom")
SAFETY_TYPES = ("ellipsoid", "halfspace", "classification", "constant", "custom")

# Norm-bounded sets are a deterministic baseline; they are never checked against the moments.
UNCHECKED_INPUT_TYPES = frozenset({"ball"})


@dataclass(frozen=True)
class InputSpec:
    """Parsed input set: one or more input QCs joined by nonnegative multipliers."""

    kind: str
    qcs: tuple[InputQc, ...]

    @property
    def risk_checked(self) -> bool:
        return self.kind not in UNCHECKED_INPUT_TYPES


@dataclass(frozen=True)
class SafetySpec:
    """Parsed safety spec; classification specs keep the class and coupling mode."""

    kind: str
    qcs: tuple[SafetyQc, ...]
    class_index: int | None = None
    mode: ClassificationMode | None = None


def read_spec_file(path: str | Path) -> dict[str, Any]:
    """Read a JSON description file into a dict."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise ParseError(f"cannot read file ({e.strerror})", path=str(path)) from e
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=str(path), line=e.lineno) from e
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", path=str(path))
    return data


def _number(data: dict[str, Any], key: str) -> bool:
    return isinstance(data.get(key), (int, float)) and not isinstance(data.get(key), bool)


def validate_input_spec(data: dict[str, Any]) -> str | None:
    """Return an error message for an invalid input-set description, else None."""
    kind = data.get("type")
    if kind not in INPUT_TYPES:
        return f"type must be one of: {', '.join(INPUT_TYPES)}"
    if kind == "confidence" and not _number(data, "level"):
        return "confidence input set requires a numeric level"
    if kind == "ball" and not _number(data, "radius_sq"):
        return "ball input set requires a numeric radius_sq"
    if kind == "halfspace" and ("normal" not in data or not _number(data, "offset")):
        return "halfspace input set requires normal and offset"
    if kind == "polytope":
        faces = data.get("faces")
        if not isinstance(faces, list) or not faces:
            return "polytope input set requires a non-empty faces list"
        for k, face in enumerate(faces):
            if not isinstance(face, dict) or "normal" not in face or not _number(face, "offset"):
                return f"faces[{k}] requires normal and offset"
    if kind == "custom" and "matrix" not in data:
        return "custom input set requires matrix"
    return None


def validate_safety_spec(data: dict[str, Any]) -> str | None:
    """Return an error message for an invalid safety-spec description, else None."""
    kind = data.get("type")
    if kind not in SAFETY_TYPES:
        return f"type must be one of: {', '.join(SAFETY_TYPES)}"
    if kind == "ellipsoid" and "shape" not in data:
        return "ellipsoid safety spec requires shape"
    if kind == "halfspace" and ("normal" not in data or not _number(data, "offset")):
        return "halfspace safety spec requires normal and offset"
    if kind == "classification":
        if not isinstance(data.get("class"), int) or isinstance(data.get("class"), bool):
            return "classification safety spec requires an integer class"
        modes = [mode.value for mode in ClassificationMode]
        if data.get("mode", ClassificationMode.PER_HYPERPLANE.value) not in modes:
            return f"mode must be one of: {', '.join(modes)}"
    if kind == "constant" and not _number(data, "value"):
        return "constant safety spec requires a numeric value"
    if kind == "custom" and "matrix" not in data:
        return "custom safety spec requires matrix"
    return None


def load_input_spec(
    data: dict[str, Any],
    ms: MomentSet,
    eps: RiskLevel | float,
    config: Config | None = None,
    path: str | None = None,
) -> InputSpec:
    """Build the input QCs described by ``data`` for a moment set and risk level.

    Raises:
        ConfigError: If the description is structurally invalid.
        ParseError: If a numeric field cannot be read.
    """
    error = validate_input_spec(data)
    if error:
        raise ConfigError(f"{path}: {error}" if path else error)
    kind = data["type"]
    ridge = config.covariance_ridge if config else 1e-10

    if kind == "ellipsoid":
        qcs = [input_qc_ellipsoid(ms, eps, ridge)]
    elif kind == "confidence":
        qcs = [input_qc_confidence(ms, float(data["level"]), ridge)]
    elif kind == "ball":
        qcs = [input_qc_ball(ms.dim, float(data["radius_sq"]))]
    elif kind == "halfspace":
        normal = coerce_vector(data["normal"], "normal", path)
        qcs = [input_qc_halfspace(normal, float(data["offset"]), ms, eps)]
    elif kind == "polytope":
        faces = [
            (coerce_vector(face["normal"], f"faces[{k}].normal", path), float(face["offset"]))
            for k, face in enumerate(data["faces"])
        ]
        qcs = input_qc_polytope(faces, ms, eps)
    else:
        matrix = coerce_matrix(data["matrix"], "matrix", path)
        if matrix.shape != (ms.dim + 1, ms.dim + 1):
            raise ParseError(
                f"custom input matrix must be {ms.dim + 1}x{ms.dim + 1}", path=path, field="matrix"
            )
        qcs = [InputQc(matrix, InputGeometry.CUSTOM)]
    return InputSpec(kind, tuple(qcs))


def load_safety_spec(
    data: dict[str, Any],
    input_dim: int,
    output_dim: int,
    path: str | None = None,
) -> SafetySpec:
    """Build the safety QCs described by ``data`` for a network of the given shape.

    Raises:
        ConfigError: If the description is structurally invalid.
        ParseError: If a numeric field cannot be read or has the wrong shape.
    """
    error = validate_safety_spec(data)
    if error:
        raise ConfigError(f"{path}: {error}" if path else error)
    kind = data["type"]
    width = input_dim + output_dim

    def output_map() -> Any:
        if "output_map" not in data:
            return output_selector(input_dim, output_dim)
        C = coerce_matrix(data["output_map"], "output_map", path)
        if C.shape[1] != width:
            raise ParseError(
                f"output_map must have {width} columns ([x; f(x)])", path=path, field="output_map"
            )
        return C

    try:
        if kind == "ellipsoid":
            shape = coerce_matrix(data["shape"], "shape", path)
            return SafetySpec(kind, (safety_qc_ellipsoid(shape, output_map(), input_dim),))
        if kind == "halfspace":
            normal = coerce_vector(data["normal"], "normal", path)
            qc = safety_qc_output_halfspace(normal, float(data["offset"]), output_map(), input_dim)
            return SafetySpec(kind, (qc,))
        if kind == "classification":
            mode = ClassificationMode(data.get("mode", ClassificationMode.PER_HYPERPLANE.value))
            built = classification_qc(int(data["class"]), output_dim, input_dim, mode)
            qcs = tuple(built) if isinstance(built, list) else (built,)
            return SafetySpec(kind, qcs, class_index=int(data["class"]), mode=mode)
        if kind == "constant":
            return SafetySpec(
                kind, (safety_qc_constant(input_dim, output_dim, float(data["value"])),)
            )
        matrix = coerce_matrix(data["matrix"], "matrix", path)
        if matrix.shape != (width + 1, width + 1):
            raise ParseError(
                f"custom safety matrix must be {width + 1}x{width + 1}", path=path, field="matrix"
            )
        return SafetySpec(kind, (SafetyQc(matrix, input_dim, SafetyProvenance.CUSTOM),))
    except DimensionMismatch as e:
        raise ParseError(str(e), path=path, field=kind) from e
