"""Dense real linear algebra: LU with partial pivoting and triangular solves.

Thin wrappers over LAPACK (via scipy) that record the smallest pivot so
callers can apply their own singularity thresholds.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, SingularMatrixError


@dataclass(frozen=True)
class Factorization:
    """Packed LU factors of a square real matrix with pivot bookkeeping."""

    lu: np.ndarray
    piv: np.ndarray
    min_pivot: float

    @property
    def n(self) -> int:
        return self.lu.shape[0]


def lu_factor(a: np.ndarray, singular_threshold: float = 0.0) -> Factorization:
    """Factor a square matrix with partial (row) pivoting.

    Raises SingularMatrixError when the smallest |pivot| falls at or below
    ``singular_threshold`` (the caller chooses the scale).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    with warnings.catch_warnings():
        # the min-pivot check below is the singularity contract
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    min_pivot = float(np.min(np.abs(np.diag(lu)))) if a.shape[0] else 0.0
    if a.shape[0] and min_pivot <= singular_threshold:
        raise SingularMatrixError(
            f"pivot {min_pivot:.3e} at or below threshold {singular_threshold:.3e}",
            min_pivot=min_pivot,
        )
    return Factorization(lu=lu, piv=piv, min_pivot=min_pivot)


def lu_solve(fact: Factorization, rhs: np.ndarray) -> np.ndarray:
    """Solve A x = rhs using a previous factorization of A."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != fact.n:
        raise DimensionMismatchError(
            f"rhs length {rhs.shape[0]} does not match matrix order {fact.n}"
        )
    return scipy.linalg.lu_solve((fact.lu, fact.piv), rhs, check_finite=False)


def inf_norm(a: np.ndarray) -> float:
    """Maximum absolute row sum for matrices, max |entry| for vectors."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.ndim == 2:
        return float(np.max(np.sum(np.abs(a), axis=1)))
    return float(np.max(np.abs(a)))
