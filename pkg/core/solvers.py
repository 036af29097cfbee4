"""
Iterative solvers for saddle-point systems.

Two solvers share one stopping rule, the relative residual

    RES = sqrt(|f - A x - B y|^2 + |g - B^T x|^2) / sqrt(|f|^2 + |g|^2)

evaluated on the true iterate at every step:

- the stationary splitting iteration w <- w + P^{-1} (b - K w)
- full (non-restarted) GMRES with right preconditioning
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Callable, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy.linalg import solve_triangular

from core.exceptions import (
    InvalidDimensionError,
    InvalidInputError,
    InvalidParameterError,
    NumericalOverflowError,
)
from core.preconditioners import Preconditioner
from core.problems import SaddlePointSystem
from linalg.sparse_core import Vector, spmv, spmv_t

logger = logging.getLogger(__name__)

IterateCallback = Callable[[int, np.ndarray], None]

# Relative disagreement above which the Givens residual estimate is reported.
ESTIMATE_AGREEMENT = 1e-8


@unique
class SolverKind(str, Enum):
    """Available iterative solvers."""

    STATIONARY = "stationary"
    GMRES = "gmres"


@dataclass(frozen=True)
class SolveConfig:
    """Stopping rule and starting point of an iterative solve."""

    tolerance: float = 1e-6
    max_iterations: int = 500
    initial_guess: Optional[Vector] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not np.isfinite(self.tolerance) or self.tolerance <= 0:
            raise InvalidParameterError(f"tolerance must be > 0, got {self.tolerance}")
        if isinstance(self.max_iterations, bool) or int(self.max_iterations) != self.max_iterations \
                or self.max_iterations < 1:
            raise InvalidParameterError(
                f"max_iterations must be an integer >= 1, got {self.max_iterations}"
            )
        object.__setattr__(self, 'max_iterations', int(self.max_iterations))

    def start(self, system: SaddlePointSystem) -> np.ndarray:
        if self.initial_guess is None:
            return np.zeros(system.size)
        w0 = np.array(self.initial_guess, dtype=np.float64)
        if w0.shape != (system.size,):
            raise InvalidDimensionError(
                f"initial guess must have {system.size} entries, got {w0.shape}"
            )
        return w0


@dataclass(frozen=True, eq=False)
class IterationReport:
    """Outcome of one solve.

    Attributes:
        iterations: Steps taken (Arnoldi steps for GMRES)
        res_history: RES at steps 0..iterations
        converged: True when the final RES is below the tolerance
        final_res: RES of the returned iterate
        wall_time_ms: Elapsed wall-clock time
        solution: The final stacked iterate (x; y)
    """

    iterations: int
    res_history: Tuple[float, ...]
    converged: bool
    final_res: float
    wall_time_ms: float
    solution: np.ndarray


def _residual_norm(system: SaddlePointSystem, x: np.ndarray, y: np.ndarray) -> float:
    r1 = system.f - spmv(system.A, x) - spmv(system.B, y)
    r2 = system.g - spmv_t(system.B, x)
    return float(np.sqrt(np.dot(r1, r1) + np.dot(r2, r2)))


def _rhs_norm(system: SaddlePointSystem) -> float:
    norm = float(np.sqrt(np.dot(system.f, system.f) + np.dot(system.g, system.g)))
    if norm == 0.0:
        raise InvalidInputError("relative residual undefined for a zero right-hand side")
    return norm


def res_norm(system: SaddlePointSystem, x: npt.ArrayLike, y: npt.ArrayLike) -> float:
    """Relative residual of the iterate (x; y).

    Args:
        system: The saddle-point system
        x: Primal block of length m
        y: Multiplier block of length n

    Returns:
        sqrt(|f - Ax - By|^2 + |g - B^T x|^2) / sqrt(|f|^2 + |g|^2)

    Raises:
        InvalidDimensionError: If x or y has the wrong length
        InvalidInputError: If f and g are both zero
    """
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.shape != (system.m,) or yv.shape != (system.n,):
        raise InvalidDimensionError(
            f"iterate shapes {xv.shape}, {yv.shape} do not match m={system.m}, n={system.n}"
        )
    return _residual_norm(system, xv, yv) / _rhs_norm(system)


def _check_finite(w: np.ndarray, step: int, what: str) -> None:
    if not np.all(np.isfinite(w)):
        raise NumericalOverflowError(f"{what} became non-finite at step {step}")


def stationary_solve(
    system: SaddlePointSystem,
    precond: Preconditioner,
    cfg: Optional[SolveConfig] = None,
    callback: Optional[IterateCallback] = None,
) -> IterationReport:
    """Run the splitting iteration w_{k+1} = w_k + P^{-1}(b - K w_k).

    This is the fixed-point form w_{k+1} = T w_k + P^{-1} b with
    T = P^{-1} Q. Iteration stops when RES < tolerance or after
    ``max_iterations`` steps.

    Args:
        system: The saddle-point system
        precond: Splitting matrix P, applied through ``apply``
        cfg: Stopping rule and initial guess (defaults: 1e-6, 500, zero)
        callback: Called as ``callback(k, w_k)`` after every step

    Returns:
        IterationReport with the RES history starting at step 0

    Raises:
        NumericalOverflowError: If an iterate becomes non-finite
    """
    cfg = cfg or SolveConfig()
    started = time.perf_counter()
    matrix = system.matrix()
    b = system.rhs()
    denominator = _rhs_norm(system)

    w = cfg.start(system)
    res = _residual_norm(system, *system.split(w)) / denominator
    history = [res]
    k = 0
    while res >= cfg.tolerance and k < cfg.max_iterations:
        w = w + precond.apply(b - spmv(matrix, w))
        k += 1
        _check_finite(w, k, "stationary iterate")
        res = _residual_norm(system, *system.split(w)) / denominator
        history.append(res)
        logger.debug("stationary step %d: RES=%.3e", k, res)
        if callback is not None:
            callback(k, w)

    elapsed = 1000.0 * (time.perf_counter() - started)
    converged = res < cfg.tolerance
    if not converged:
        logger.debug("stationary iteration stopped at the cap of %d steps (RES=%.3e)", k, res)
    return IterationReport(
        iterations=k,
        res_history=tuple(history),
        converged=converged,
        final_res=res,
        wall_time_ms=elapsed,
        solution=w,
    )


def _givens(a: float, b: float) -> Tuple[float, float]:
    """Rotation (c, s) with [[c, s], [-s, c]] @ (a, b) = (r, 0)."""
    if b == 0.0:
        return 1.0, 0.0
    r = np.hypot(a, b)
    return a / r, b / r


def gmres_solve(
    system: SaddlePointSystem,
    precond: Optional[Preconditioner] = None,
    cfg: Optional[SolveConfig] = None,
    callback: Optional[IterateCallback] = None,
) -> IterationReport:
    """Full GMRES with right preconditioning.

    The Krylov space is built for the operator w -> K P^{-1} w with modified
    Gram-Schmidt; the small least-squares problem is reduced with Givens
    rotations. After every Arnoldi step the current iterate
    w_k = w_0 + P^{-1} V_k y_k is formed and its true RES decides
    convergence, so the reported history is the true relative residual.

    Args:
        system: The saddle-point system
        precond: Preconditioner, or None for plain GMRES
        cfg: Stopping rule and initial guess
        callback: Called as ``callback(k, w_k)`` after every Arnoldi step

    Returns:
        IterationReport counting Arnoldi steps as iterations

    Raises:
        NumericalOverflowError: If a basis vector becomes non-finite
    """
    cfg = cfg or SolveConfig()
    started = time.perf_counter()
    matrix = system.matrix()
    b = system.rhs()
    denominator = _rhs_norm(system)

    def right(v: np.ndarray) -> np.ndarray:
        return v if precond is None else precond.apply(v)

    w0 = cfg.start(system)
    w = w0
    r0 = b - spmv(matrix, w0)
    beta0 = float(np.linalg.norm(r0))
    res = _residual_norm(system, *system.split(w0)) / denominator
    history = [res]

    # The Krylov dimension cannot exceed the system size.
    steps = min(cfg.max_iterations, system.size)
    k = 0
    if res >= cfg.tolerance and beta0 > 0.0:
        basis = np.zeros((steps + 1, system.size))
        hessenberg = np.zeros((steps + 1, steps))
        cosines = np.zeros(steps)
        sines = np.zeros(steps)
        g = np.zeros(steps + 1)
        g[0] = beta0
        basis[0] = r0 / beta0

        for j in range(steps):
            v = spmv(matrix, right(basis[j]))
            column_norm = float(np.linalg.norm(v))
            for i in range(j + 1):
                hessenberg[i, j] = np.dot(basis[i], v)
                v -= hessenberg[i, j] * basis[i]
            h_next = float(np.linalg.norm(v))
            hessenberg[j + 1, j] = h_next
            _check_finite(hessenberg[:j + 2, j], j + 1, "Arnoldi vector")

            for i in range(j):
                upper, lower = hessenberg[i, j], hessenberg[i + 1, j]
                hessenberg[i, j] = cosines[i] * upper + sines[i] * lower
                hessenberg[i + 1, j] = -sines[i] * upper + cosines[i] * lower
            cosines[j], sines[j] = _givens(hessenberg[j, j], hessenberg[j + 1, j])
            hessenberg[j, j] = cosines[j] * hessenberg[j, j] + sines[j] * hessenberg[j + 1, j]
            hessenberg[j + 1, j] = 0.0
            g[j + 1] = -sines[j] * g[j]
            g[j] = cosines[j] * g[j]

            y = solve_triangular(hessenberg[:j + 1, :j + 1], g[:j + 1], check_finite=False)
            w = w0 + right(basis[:j + 1].T @ y)
            k = j + 1
            _check_finite(w, k, "GMRES iterate")
            res = _residual_norm(system, *system.split(w)) / denominator
            history.append(res)

            estimate = abs(g[j + 1]) / denominator
            if abs(estimate - res) > ESTIMATE_AGREEMENT * max(res, estimate, 1e-300):
                logger.debug("GMRES step %d: true RES=%.3e, rotation estimate=%.3e", k, res, estimate)
            else:
                logger.debug("GMRES step %d: RES=%.3e", k, res)
            if callback is not None:
                callback(k, w)

            if res < cfg.tolerance:
                break
            if h_next <= np.finfo(float).eps * column_norm:
                logger.warning(
                    "GMRES breakdown at step %d with RES=%.3e above tolerance", k, res
                )
                break
            basis[j + 1] = v / h_next

    elapsed = 1000.0 * (time.perf_counter() - started)
    return IterationReport(
        iterations=k,
        res_history=tuple(history),
        converged=res < cfg.tolerance,
        final_res=res,
        wall_time_ms=elapsed,
        solution=w,
    )


def solve(
    system: SaddlePointSystem,
    precond: Optional[Preconditioner],
    cfg: Optional[SolveConfig] = None,
    solver: SolverKind = SolverKind.GMRES,
    callback: Optional[IterateCallback] = None,
) -> IterationReport:
    """Dispatch to :func:`stationary_solve` or :func:`gmres_solve`.

    Raises:
        InvalidParameterError: If the stationary solver is asked to run
            without a splitting matrix
    """
    if SolverKind(solver) is SolverKind.STATIONARY:
        if precond is None:
            raise InvalidParameterError("the stationary iteration needs a preconditioner")
        return stationary_solve(system, precond, cfg, callback)
    return gmres_solve(system, precond, cfg, callback)
