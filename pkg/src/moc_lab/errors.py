"""Exception hierarchy shared by every layer of the toolkit.

Each error carries a stable machine-readable ``code`` so that CLI exit
codes, report files, and HTTP error bodies all agree on the failure class.
"""

from __future__ import annotations


class MocLabError(Exception):
    """Base class for all toolkit errors."""

    code = "error"


class DimensionError(MocLabError):
    """Shape or arity of an input is wrong (non-square, mismatch, empty)."""

    code = "dimension"


class ClassificationError(MocLabError):
    """An input fails a structural gate (not hermitian/normal/unitary enough)."""

    code = "classification"


class CapacityError(MocLabError):
    """An enumeration would exceed the configured permutation cap."""

    code = "capacity"


class ConvergenceError(MocLabError):
    """An iterative method exhausted its budget; carries the best residual."""

    code = "convergence"

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ParseError(MocLabError):
    """Malformed input file or scalar literal."""

    code = "parse"


class CertificateError(MocLabError):
    """A convex-combination certificate is missing where one is required."""

    code = "certificate"
