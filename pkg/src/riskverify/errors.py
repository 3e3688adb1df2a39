"""Exception hierarchy for riskverify.

Validation failures subclass ``ValueError`` as well so callers that only
know about the standard library still catch them.
"""

from __future__ import annotations


class RiskVerifyError(Exception):
    """Base class for all riskverify errors."""


class ConfigError(RiskVerifyError, ValueError):
    """An experiment or CLI configuration is invalid."""


class ParseError(RiskVerifyError, ValueError):
    """A matrix, network or spec file could not be parsed.

    Attributes:
        path: File that failed to parse, if known.
        line: 1-based line number (CSV) or None.
        field: Offending field or JSON path, if known.
    """

    def __init__(
        self,
        message: str,
        *,
        path: str | None = None,
        line: int | None = None,
        field: str | None = None,
    ) -> None:
        self.path = path
        self.line = line
        self.field = field
        location = []
        if path is not None:
            location.append(path)
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(field)
        prefix = f"{': '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class UnsupportedActivation(ParseError):
    """The network uses an activation other than relu."""


class DimensionMismatch(RiskVerifyError, ValueError):
    """Operands have incompatible shapes."""


class InvalidRiskLevel(RiskVerifyError, ValueError):
    """Risk level outside the open interval (0, 1)."""


class InvalidCovariance(RiskVerifyError, ValueError):
    """Covariance is not symmetric positive semidefinite."""


class SingularCovariance(RiskVerifyError, ValueError):
    """Covariance cannot be inverted even after regularization."""


class SingularShape(RiskVerifyError, ValueError):
    """Ellipsoid shape matrix is not positive definite."""


class EmptyInput(RiskVerifyError, ValueError):
    """No samples were supplied."""


class InsufficientData(RiskVerifyError, ValueError):
    """Too few rows to estimate moments."""


class InvalidParameter(RiskVerifyError, ValueError):
    """A distribution or generator parameter is out of range."""


class NegativeMultiplier(RiskVerifyError, ValueError):
    """A sign-constrained QC multiplier is negative."""


class ZeroNormal(RiskVerifyError, ValueError):
    """A halfspace face has a zero normal vector."""


class InvalidClassIndex(RiskVerifyError, ValueError):
    """Class index out of range for the classifier."""


class InputQcViolated(RiskVerifyError):
    """The input QC matrix P is not risk-admissible for the moment set."""


class SolverError(RiskVerifyError):
    """The conic solver failed or returned an unusable status."""


class UnboundedError(SolverError):
    """The conic program is unbounded."""
