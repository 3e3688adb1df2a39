"""Matrix and vector files: CSV (row per line) and JSON nested arrays.

Numbers are written with 17 significant digits so values round-trip
exactly at double precision.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from riskverify.errors import ParseError
from riskverify.risk.moments import FloatArray

JSON_SUFFIXES = frozenset({".json"})


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def _read_text(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read file ({e.strerror})", path=str(path)) from e


def coerce_matrix(value: Any, field: str, path: str | None = None) -> FloatArray:
    """Turn a decoded JSON value (nested list or scalar) into a 2-D float array."""
    try:
        matrix = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise ParseError(f"not a numeric array ({e})", path=path, field=field) from e
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    elif matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    if matrix.ndim != 2:
        raise ParseError(f"expected a matrix, got {matrix.ndim} dimensions", path=path, field=field)
    if not np.all(np.isfinite(matrix)):
        raise ParseError("matrix has non-finite entries", path=path, field=field)
    return matrix


def coerce_vector(value: Any, field: str, path: str | None = None) -> FloatArray:
    """Flatten a row or column matrix into a vector."""
    matrix = coerce_matrix(value, field, path)
    if 1 not in matrix.shape:
        raise ParseError(f"expected a vector, got shape {matrix.shape}", path=path, field=field)
    return matrix.ravel()


def _parse_csv(text: str, path: str) -> FloatArray:
    rows: list[list[float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            row = [float(cell) for cell in stripped.split(",")]
        except ValueError as e:
            raise ParseError(f"non-numeric entry ({e})", path=path, line=lineno) from e
        if rows and len(row) != len(rows[0]):
            raise ParseError(
                f"row has {len(row)} entries, expected {len(rows[0])}", path=path, line=lineno
            )
        rows.append(row)
    if not rows:
        raise ParseError("file contains no rows", path=path)
    return np.array(rows, dtype=float)


def read_matrix(path: str | Path) -> FloatArray:
    """Read a matrix from a .csv or .json file."""
    path = Path(path)
    text = _read_text(path)
    if path.suffix.lower() in JSON_SUFFIXES:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, path=str(path), line=e.lineno) from e
        return coerce_matrix(data, "$", str(path))
    return _parse_csv(text, str(path))


def read_vector(path: str | Path) -> FloatArray:
    """Read a vector stored as one row or one column."""
    return coerce_vector(read_matrix(path), "$", str(path))


def write_matrix(path: str | Path, matrix: Any) -> None:
    """Write a matrix as CSV, or JSON when the suffix is .json."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.atleast_2d(np.asarray(matrix, dtype=float))
    if path.suffix.lower() in JSON_SUFFIXES:
        path.write_text(json.dumps(data.tolist()) + "\n")
        return
    lines = [",".join(format_float(v) for v in row) for row in data]
    path.write_text("\n".join(lines) + "\n")
