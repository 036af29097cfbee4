"""Dense factorizations for the inner solves and the rank oracle.

LU with partial pivoting and Cholesky are delegated to LAPACK through
``scipy.linalg``; the factor objects keep the packed LAPACK output so a
factorization is computed once and reused by every solve. Numerical rank uses
complete-pivoting Gaussian elimination.
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg as sla

from core.exceptions import (
    InvalidDimensionError,
    InvalidInputError,
    NotPositiveDefiniteError,
    SingularMatrixError,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12


def _square(m: npt.ArrayLike, what: str) -> np.ndarray:
    matrix = np.asarray(m, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidDimensionError(f"{what} needs a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] == 0:
        raise InvalidDimensionError(f"{what} needs a non-empty matrix")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError(f"{what} input has non-finite entries")
    return matrix


def _rhs(order: int, b: npt.ArrayLike) -> np.ndarray:
    rhs = np.asarray(b)
    if rhs.ndim not in (1, 2) or rhs.shape[0] != order:
        raise InvalidDimensionError(f"right-hand side must have {order} rows, got {rhs.shape}")
    return rhs


@dataclass(frozen=True)
class LUFactors:
    """Packed LU factors of a square matrix with partial pivoting.

    ``packed`` holds U on and above the diagonal and the multipliers of the
    unit lower-triangular L below it. ``pivots`` is the LAPACK row-interchange
    sequence: row i was swapped with row ``pivots[i]`` at step i.
    """

    packed: np.ndarray
    pivots: np.ndarray

    @property
    def order(self) -> int:
        return int(self.packed.shape[0])

    @property
    def lower(self) -> np.ndarray:
        return np.tril(self.packed, -1) + np.eye(self.order)

    @property
    def upper(self) -> np.ndarray:
        return np.triu(self.packed)

    @property
    def permutation(self) -> np.ndarray:
        """Row order ``perm`` such that ``M[perm] == lower @ upper``."""
        perm = np.arange(self.order)
        for i, j in enumerate(self.pivots):
            perm[[i, j]] = perm[[j, i]]
        return perm


@dataclass(frozen=True)
class CholFactors:
    """Lower-triangular Cholesky factor L with M = L L^T."""

    lower: np.ndarray

    @property
    def order(self) -> int:
        return int(self.lower.shape[0])


def lu_factor(m: npt.ArrayLike) -> LUFactors:
    """Factor a square matrix as PM = LU with partial pivoting.

    Args:
        m: Square dense matrix

    Returns:
        LUFactors holding the packed factors and pivot sequence

    Raises:
        InvalidDimensionError: If the matrix is not square or is empty
        SingularMatrixError: If elimination meets an exactly zero pivot
    """
    matrix = _square(m, "lu_factor")
    with warnings.catch_warnings():
        # Exact singularity is reported through the U diagonal below.
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        packed, pivots = sla.lu_factor(matrix, check_finite=False)
    diagonal = np.diag(packed)
    zero = np.flatnonzero(diagonal == 0.0)
    if zero.size:
        raise SingularMatrixError(f"zero pivot in column {int(zero[0])} of {matrix.shape[0]}")
    logger.debug("LU factorized %dx%d matrix", *matrix.shape)
    packed.flags.writeable = False
    pivots.flags.writeable = False
    return LUFactors(packed=packed, pivots=pivots)


def lu_solve(factors: LUFactors, b: npt.ArrayLike) -> np.ndarray:
    """Solve M x = b from a previous :func:`lu_factor`.

    ``b`` may be a vector or a block of column vectors; complex right-hand
    sides are solved by their real and imaginary parts.
    """
    rhs = _rhs(factors.order, b)
    if np.iscomplexobj(rhs):
        return lu_solve(factors, rhs.real) + 1j * lu_solve(factors, rhs.imag)
    if not np.all(np.isfinite(np.diag(factors.packed))):
        raise SingularMatrixError("factors contain non-finite pivots")
    return sla.lu_solve((factors.packed, factors.pivots), rhs, check_finite=False)


def chol_factor(m: npt.ArrayLike) -> CholFactors:
    """Cholesky factorization M = L L^T of a symmetric positive definite matrix.

    Raises:
        InvalidInputError: If M is not symmetric within 1e-12 relative
        NotPositiveDefiniteError: If a non-positive pivot is met
    """
    matrix = _square(m, "chol_factor")
    scale = np.abs(matrix).max()
    if np.abs(matrix - matrix.T).max() > SYMMETRY_TOLERANCE * scale:
        raise InvalidInputError("chol_factor needs a symmetric matrix")
    try:
        lower = sla.cholesky(matrix, lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"matrix is not positive definite: {e}") from e
    logger.debug("Cholesky factorized %dx%d matrix", *matrix.shape)
    lower.flags.writeable = False
    return CholFactors(lower=lower)


def chol_solve(factors: CholFactors, b: npt.ArrayLike) -> np.ndarray:
    rhs = _rhs(factors.order, b)
    if np.iscomplexobj(rhs):
        return chol_solve(factors, rhs.real) + 1j * chol_solve(factors, rhs.imag)
    return sla.cho_solve((factors.lower, True), rhs, check_finite=False)


def numerical_rank(m: npt.ArrayLike, tol: float) -> int:
    """Rank by Gaussian elimination with complete pivoting.

    A pivot counts when its magnitude exceeds ``tol`` times the largest
    absolute entry of the input.

    Args:
        m: Dense real matrix of any shape
        tol: Relative pivot threshold, must be positive

    Returns:
        Number of accepted pivots; 0 for an empty or zero matrix

    Raises:
        InvalidInputError: If tol is not positive
    """
    if not tol > 0:
        raise InvalidInputError(f"rank tolerance must be positive, got {tol}")
    work = np.array(m, dtype=np.float64, copy=True)
    if work.ndim != 2:
        raise InvalidDimensionError("numerical_rank needs a two-dimensional matrix")
    if work.size == 0:
        return 0

    threshold = tol * np.abs(work).max()
    rows, cols = work.shape
    rank = 0
    for k in range(min(rows, cols)):
        block = np.abs(work[k:, k:])
        i, j = np.unravel_index(int(block.argmax()), block.shape)
        if block[i, j] <= threshold:
            break
        pr, pc = k + int(i), k + int(j)
        work[[k, pr], :] = work[[pr, k], :]
        work[:, [k, pc]] = work[:, [pc, k]]

        multipliers = work[k + 1:, k] / work[k, k]
        work[k + 1:, k:] -= np.outer(multipliers, work[k, k:])
        rank += 1
    return rank
