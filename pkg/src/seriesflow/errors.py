"""Exception types shared across the package."""

from __future__ import annotations


class SeriesFlowError(Exception):
    """Base class for all package-specific errors."""


class CaseSyntaxError(SeriesFlowError):
    """Malformed case or sidecar text.

    Carries the 1-based line/column of the offending token when known.
    """

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class CaseSemanticError(SeriesFlowError):
    """Structurally valid input that violates a network-model invariant."""


class DegenerateBranchError(SeriesFlowError):
    """Branch with zero series impedance (r = x = 0) cannot be stamped."""


class OrderOutOfRangeError(SeriesFlowError):
    """A series coefficient beyond the available orders was requested."""


class OrderTooLowError(SeriesFlowError):
    """The series is too short for the requested estimate."""


class KindMismatchError(SeriesFlowError):
    """Equation kind not applicable to the bus's partition (PQ/PV/REF)."""


class NotZipBusError(SeriesFlowError):
    """ZIP-load operation requested for a bus without a ZIP entry."""


class SingularMatrixError(SeriesFlowError):
    """LU factorization produced a pivot below the caller's threshold."""

    def __init__(self, message: str, min_pivot: float = 0.0):
        self.min_pivot = min_pivot
        super().__init__(message)


class DimensionMismatchError(SeriesFlowError):
    """Operands with incompatible shapes."""


class BaseNotConvergedError(SeriesFlowError):
    """Expansion requested about a point that does not solve the power flow."""


class SingularAtExpansionPointError(SeriesFlowError):
    """The per-order system matrix is numerically singular at the expansion
    point; for a loaded network this is typically the PV-curve nose."""
