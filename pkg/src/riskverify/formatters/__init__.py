"""File formats for matrices and reports."""

from riskverify.formatters.matrix_formatter import (
    coerce_matrix,
    coerce_vector,
    format_float,
    read_matrix,
    read_vector,
    write_matrix,
)
from riskverify.formatters.report_formatter import (
    dumps_json,
    read_csv,
    to_jsonable,
    write_csv,
    write_json,
)

__all__ = [
    "coerce_matrix",
    "coerce_vector",
    "dumps_json",
    "format_float",
    "read_csv",
    "read_matrix",
    "read_vector",
    "to_jsonable",
    "write_csv",
    "write_json",
    "write_matrix",
]
