"""
Spectral analysis of the splitting iteration and the preconditioned matrix.

Dense eigenvalue work runs on LAPACK through ``scipy.linalg`` and is limited
to small problems. Besides the numerical spectra this module evaluates the
closed-form eigenvalue predictions for the MGSSP preconditioned matrix:
for an eigenvector (u; v) of P^{-1} K with B^T u != 0 and

    a1 + i b1 = u* A u / u* u,    c1 = |B^T u|^2 / u* u,

the eigenvalue is a root of

    (alpha beta + 2 beta (a1 + i b1) + 4 c1) l^2 - (4 c1 + beta (a1 + i b1)) l + c1 = 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg as sla

from core.exceptions import (
    EigensolverError,
    InvalidDimensionError,
    InvalidInputError,
    ResourceLimitError,
)
from core.preconditioners import (
    FamilyKind,
    ShiftParams,
    ShiftSplitPreconditioner,
    assemble_Q,
    build,
)
from core.problems import SaddlePointSystem
from linalg.dense_factor import numerical_rank
from linalg.sparse_core import ComplexList, DenseMatrix, SparseMatrix, spmv, spmv_t, sym_skew_split, to_dense

logger = logging.getLogger(__name__)

EIGEN_DIMENSION_LIMIT = 2000
SYMMETRY_TOLERANCE = 1e-12
UNIT_EIGENVALUE_TOLERANCE = 1e-8
CONVERGENCE_MARGIN = 1e-10
DEFAULT_RANK_TOLERANCE = 1e-8


def _square(m: npt.ArrayLike, what: str) -> np.ndarray:
    matrix = np.asarray(m)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidDimensionError(f"{what} needs a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] > EIGEN_DIMENSION_LIMIT:
        raise ResourceLimitError(
            f"{what} is limited to dimension {EIGEN_DIMENSION_LIMIT}, got {matrix.shape[0]}"
        )
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError(f"{what} input has non-finite entries")
    return matrix


def dense_eigenvalues(m: npt.ArrayLike) -> ComplexList:
    """All eigenvalues of a square dense matrix.

    LAPACK reduces the matrix to Hessenberg form and runs the Francis
    double-shift QR iteration; the result is sorted by real then imaginary part.

    Raises:
        ResourceLimitError: If the dimension exceeds 2000
        EigensolverError: If the QR iteration does not converge
    """
    matrix = _square(m, "dense_eigenvalues")
    if matrix.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128)
    try:
        values = sla.eigvals(matrix, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise EigensolverError(f"eigenvalue iteration failed: {e}") from e
    return np.sort_complex(values.astype(np.complex128))


def dense_eigenpairs(m: npt.ArrayLike) -> Tuple[ComplexList, np.ndarray]:
    """Eigenvalues and unit right eigenvectors (as columns)."""
    matrix = _square(m, "dense_eigenpairs")
    try:
        values, vectors = sla.eig(matrix, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise EigensolverError(f"eigenvalue iteration failed: {e}") from e
    return values.astype(np.complex128), vectors.astype(np.complex128)


def symmetric_extremes(m: npt.ArrayLike) -> Tuple[float, float]:
    """Smallest and largest eigenvalue of a symmetric matrix.

    Raises:
        InvalidInputError: If the matrix is not symmetric within 1e-12 relative

    Example:
        symmetric_extremes([[2, 1], [1, 2]])
        # Returns: (1.0, 3.0)
    """
    matrix = _square(m, "symmetric_extremes").astype(np.float64)
    if matrix.shape[0] == 0:
        raise InvalidDimensionError("symmetric_extremes needs a non-empty matrix")
    scale = np.abs(matrix).max()
    if np.abs(matrix - matrix.T).max() > SYMMETRY_TOLERANCE * scale:
        raise InvalidInputError("symmetric_extremes needs a symmetric matrix")
    try:
        values = sla.eigvalsh(matrix, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise EigensolverError(f"symmetric eigensolver failed: {e}") from e
    return float(values[0]), float(values[-1])


def skew_radius(s: npt.ArrayLike) -> float:
    """Spectral radius of a skew-symmetric matrix, sqrt(lambda_max(S^T S))."""
    matrix = _square(s, "skew_radius").astype(np.float64)
    if matrix.shape[0] == 0:
        return 0.0
    scale = np.abs(matrix).max()
    if np.abs(matrix + matrix.T).max() > SYMMETRY_TOLERANCE * scale:
        raise InvalidInputError("skew_radius needs a skew-symmetric matrix")
    _, largest = symmetric_extremes(matrix.T @ matrix)
    return float(np.sqrt(max(largest, 0.0)))


def operator_extents(a: SparseMatrix) -> Tuple[float, float, float]:
    """(lambda_min(H), rho(H), rho(S)) for the symmetric/skew split of A."""
    h, s = sym_skew_split(a)
    low, high = symmetric_extremes(to_dense(h))
    return low, max(abs(low), abs(high)), skew_radius(to_dense(s))


def _guard_system(system: SaddlePointSystem) -> None:
    if system.size > EIGEN_DIMENSION_LIMIT:
        raise ResourceLimitError(
            f"spectral analysis is limited to dimension {EIGEN_DIMENSION_LIMIT}, got {system.size}"
        )


def iteration_matrix_of(precond: ShiftSplitPreconditioner) -> DenseMatrix:
    """T = P^{-1} Q for an already built preconditioner."""
    _guard_system(precond.system)
    return precond.apply(assemble_Q(precond))


def preconditioned_matrix_of(precond: ShiftSplitPreconditioner) -> DenseMatrix:
    """P^{-1} K for an already built preconditioner."""
    _guard_system(precond.system)
    return precond.apply(to_dense(precond.system.matrix()))


def iteration_matrix(system: SaddlePointSystem, kind: FamilyKind, params: ShiftParams) -> DenseMatrix:
    """Dense iteration matrix T(alpha, beta) = P^{-1} Q.

    Each column is P^{-1} applied to the matching column of Q.

    Raises:
        ResourceLimitError: If m + n exceeds 2000
    """
    _guard_system(system)
    return iteration_matrix_of(build(kind, system, params))


def preconditioned_matrix(system: SaddlePointSystem, kind: FamilyKind, params: ShiftParams) -> DenseMatrix:
    """Dense preconditioned matrix P^{-1} K, equal to I - T."""
    _guard_system(system)
    return preconditioned_matrix_of(build(kind, system, params))


def convergence_check(t: npt.ArrayLike) -> Tuple[float, bool]:
    """Spectral radius of T and whether the iteration converges (rho < 1 - 1e-10)."""
    values = dense_eigenvalues(t)
    rho = float(np.abs(values).max()) if values.size else 0.0
    return rho, rho < 1.0 - CONVERGENCE_MARGIN


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Spectrum of an iteration matrix and its semi-convergence verdict.

    The pseudo-spectral radius skips eigenvalues within 1e-8 of 1 and is 0
    when nothing remains.
    """

    eigenvalues: ComplexList
    spectral_radius: float
    pseudo_spectral_radius: float
    index_condition_ok: bool
    rank_i_minus_t: int
    rank_i_minus_t_squared: int

    @property
    def semi_convergent(self) -> bool:
        return self.pseudo_spectral_radius < 1.0 and self.index_condition_ok


def semiconvergence_check(t: npt.ArrayLike, rank_tol: float = DEFAULT_RANK_TOLERANCE) -> SpectralReport:
    """Check both semi-convergence conditions of a splitting iteration.

    Args:
        t: Square iteration matrix
        rank_tol: Relative pivot threshold for the rank comparison

    Returns:
        SpectralReport with the pseudo-spectral radius and the ranks of
        I - T and (I - T)^2; the index condition holds when they are equal
    """
    matrix = _square(t, "semiconvergence_check")
    values = dense_eigenvalues(matrix)
    moduli = np.abs(values)
    rho = float(moduli.max()) if values.size else 0.0
    off_unit = moduli[np.abs(values - 1.0) > UNIT_EIGENVALUE_TOLERANCE]
    gamma = float(off_unit.max()) if off_unit.size else 0.0

    shifted = np.eye(matrix.shape[0]) - matrix
    rank_one = numerical_rank(shifted, rank_tol)
    rank_two = numerical_rank(shifted @ shifted, rank_tol)
    logger.debug("rho=%.6f gamma=%.6f rank(I-T)=%d rank((I-T)^2)=%d", rho, gamma, rank_one, rank_two)
    return SpectralReport(
        eigenvalues=values,
        spectral_radius=rho,
        pseudo_spectral_radius=gamma,
        index_condition_ok=rank_one == rank_two,
        rank_i_minus_t=rank_one,
        rank_i_minus_t_squared=rank_two,
    )


@dataclass(frozen=True)
class QuadraticCoeffs:
    """Coefficients of x^2 - phi x + psi = 0."""

    phi: complex
    psi: complex

    def __post_init__(self) -> None:
        if not (np.isfinite(self.phi) and np.isfinite(self.psi)):
            raise InvalidInputError("quadratic coefficients must be finite")


def root_modulus_predicate(q: QuadraticCoeffs) -> bool:
    """True iff both roots of x^2 - phi x + psi = 0 lie strictly inside the unit disc.

    Uses |phi - conj(phi) psi| + |psi|^2 < 1.
    """
    phi, psi = complex(q.phi), complex(q.psi)
    return abs(phi - phi.conjugate() * psi) + abs(psi) ** 2 < 1.0


@dataclass(frozen=True)
class RayleighTriple:
    """Per-vector scalars a1 + i b1 = u*Au/u*u and c1 = |B^T u|^2/u*u."""

    a1: float
    b1: float
    c1: float

    def __post_init__(self) -> None:
        if not all(np.isfinite(x) for x in (self.a1, self.b1, self.c1)):
            raise InvalidInputError("Rayleigh triple must be finite")
        if self.c1 < 0:
            raise InvalidInputError(f"c1 must be >= 0, got {self.c1}")


@dataclass(frozen=True)
class EigPrediction:
    z1: float
    z2: float
    lambda_plus: complex
    lambda_minus: complex


def rayleigh_triple(system: SaddlePointSystem, u: npt.ArrayLike) -> RayleighTriple:
    """Rayleigh triple of a (complex) vector u of length m.

    Raises:
        InvalidDimensionError: If u does not have m entries
        InvalidInputError: If u is zero
    """
    vec = np.asarray(u, dtype=np.complex128)
    if vec.shape != (system.m,):
        raise InvalidDimensionError(f"u must have {system.m} entries, got {vec.shape}")
    norm_sq = float(np.vdot(vec, vec).real)
    if norm_sq == 0.0:
        raise InvalidInputError("Rayleigh triple of a zero vector")
    quotient = np.vdot(vec, spmv(system.A, vec)) / norm_sq
    projected = spmv_t(system.B, vec)
    c1 = float(np.vdot(projected, projected).real) / norm_sq
    return RayleighTriple(a1=float(quotient.real), b1=float(quotient.imag), c1=c1)


def _sign(x: float) -> float:
    return -1.0 if x < 0 else 1.0


def predict_eigenpair(t: RayleighTriple, params: ShiftParams) -> EigPrediction:
    """Closed-form eigenvalues predicted by a Rayleigh triple.

    With a2 = beta^2 (a1^2 - b1^2) - 4 alpha beta c1 and b2 = 2 beta^2 a1 b1,
    z1 + i z2 is the square root of a2 + i b2 with z1 >= 0 and z2 taking the
    sign of b1 (sign(0) = +1).

    Raises:
        InvalidInputError: If the leading coefficient of the quadratic vanishes

    Example:
        predict_eigenpair(RayleighTriple(1, 0, 0), ShiftParams(0, 1))
        # Returns: z1=1, z2=0, lambda_plus=0.5, lambda_minus=0
    """
    alpha, beta = params.alpha, params.beta
    a1, b1, c1 = t.a1, t.b1, t.c1
    lead = complex(alpha * beta + 2 * beta * a1 + 4 * c1, 2 * beta * b1)
    if lead == 0:
        raise InvalidInputError("degenerate leading coefficient alpha*beta + 2*beta*a1 + 4*c1 = 0")

    a2 = beta**2 * (a1**2 - b1**2) - 4 * alpha * beta * c1
    b2 = 2 * beta**2 * a1 * b1
    modulus = float(np.hypot(a2, b2))
    z1 = float(np.sqrt(max(modulus + a2, 0.0) / 2))
    z2 = _sign(b1) * float(np.sqrt(max(modulus - a2, 0.0) / 2))

    middle = complex(4 * c1 + beta * a1, beta * b1)
    root = complex(z1, z2)
    return EigPrediction(
        z1=z1,
        z2=z2,
        lambda_plus=(middle + root) / (2 * lead),
        lambda_minus=(middle - root) / (2 * lead),
    )


def disc_bound(t: RayleighTriple, params: ShiftParams) -> float:
    """Squared radius f(a1, b1, c1) of the disc around 1/2 holding both predicted eigenvalues."""
    alpha, beta = params.alpha, params.beta
    a1, b1, c1 = t.a1, t.b1, t.c1
    numerator = (alpha * beta + 2 * beta * a1) ** 2 + (
        beta * abs(b1) + np.sqrt(beta**2 * b1**2 + 4 * alpha * beta * c1)
    ) ** 2
    denominator = 4 * ((alpha * beta + 2 * beta * a1 + 4 * c1) ** 2 + 4 * beta**2 * b1**2)
    return float(numerator / denominator)


def real_part_floor(t: RayleighTriple, params: ShiftParams) -> float:
    """Lower bound 4 c1 (beta a1 + 2 c1) / ((alpha beta + 2 beta a1 + 4 c1)^2 + 4 beta^2 b1^2)
    on the real parts of both predicted eigenvalues."""
    alpha, beta = params.alpha, params.beta
    a1, b1, c1 = t.a1, t.b1, t.c1
    denominator = (alpha * beta + 2 * beta * a1 + 4 * c1) ** 2 + 4 * beta**2 * b1**2
    return float(4 * c1 * (beta * a1 + 2 * c1) / denominator)


def btu_zero_bounds(min_h: float, rho_h: float, rho_s: float, alpha: float) -> Tuple[float, float, float]:
    """Bounds for eigenvalues whose eigenvector has B^T u = 0.

    Such eigenvalues equal (a1 + i b1) / (alpha + 2 (a1 + i b1)), so

        re_lo  = minH (alpha + 2 minH) / ((alpha + 2 rhoH)^2 + 4 rhoS^2)
        re_hi  = (rhoH (alpha + 2 rhoH) + 2 rhoS^2) / (alpha + 2 minH)^2
        im_abs = alpha rhoS / (alpha + 2 minH)^2

    Raises:
        InvalidInputError: Unless 0 < minH <= rhoH, rhoS >= 0 and alpha >= 0

    Example:
        btu_zero_bounds(1, 2, 1, 1)
        # Returns: (3/29, 4/3, 1/9)
    """
    if not (0 < min_h <= rho_h) or rho_s < 0 or alpha < 0:
        raise InvalidInputError(
            f"need 0 < minH <= rhoH, rhoS >= 0, alpha >= 0; got {min_h}, {rho_h}, {rho_s}, {alpha}"
        )
    low_denominator = (alpha + 2 * min_h) ** 2
    re_lo = min_h * (alpha + 2 * min_h) / ((alpha + 2 * rho_h) ** 2 + 4 * rho_s**2)
    re_hi = (rho_h * (alpha + 2 * rho_h) + 2 * rho_s**2) / low_denominator
    im_abs = alpha * rho_s / low_denominator
    return re_lo, re_hi, im_abs


def eigenspace_dim(m: npt.ArrayLike, lam: complex, tol: float = DEFAULT_RANK_TOLERANCE) -> int:
    """Dimension of the null space of M - lam I.

    A real shift uses real elimination; a complex shift C = M - lam I uses
    the real embedding [[Re C, -Im C], [Im C, Re C]], whose rank is twice
    the rank of C.
    """
    matrix = np.asarray(m)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidDimensionError(f"eigenspace_dim needs a square matrix, got shape {matrix.shape}")
    order = matrix.shape[0]
    shifted = matrix - complex(lam) * np.eye(order)
    if not np.iscomplexobj(matrix) and complex(lam).imag == 0:
        return order - numerical_rank(shifted.real, tol)
    real, imag = shifted.real, shifted.imag
    embedding = np.block([[real, -imag], [imag, real]])
    return (2 * order - numerical_rank(embedding, tol)) // 2
