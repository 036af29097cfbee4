"""
Generators for the benchmark saddle-point systems.

Both benchmarks discretize a two-dimensional convection-diffusion operator on
a p-by-p interior grid with centered differences:

- Example 1 has a full-column-rank constraint block B.
- Example 2 appends two columns that lie in the range of Example 1's B,
  which makes the saddle-point matrix singular but keeps the system consistent.

The exact solution of every generated system is the all-ones vector.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from core.exceptions import InvalidDimensionError, InvalidInputError, InvalidParameterError
from linalg.sparse_core import (
    SparseMatrix,
    Vector,
    assemble_saddle,
    block_diag,
    column,
    hstack,
    kron,
    spmv,
    spmv_t,
    sym_skew_split,
    tridiag,
    vstack,
)

logger = logging.getLogger(__name__)

# Positive-definiteness probe: number of random unit vectors and their seed.
PD_PROBES = 20
PD_PROBE_SEED = 0


@dataclass(frozen=True)
class ProblemParams:
    """Grid parameters of a benchmark problem.

    Attributes:
        p: Interior grid points per direction
        v: Viscosity
        h: Mesh size, always 1 / (p + 1)
    """

    p: int
    v: float
    h: float = field(init=False)

    def __post_init__(self) -> None:
        if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 2:
            raise InvalidParameterError(f"grid count p must be an integer >= 2, got {self.p}")
        if not np.isfinite(self.v) or self.v <= 0:
            raise InvalidParameterError(f"viscosity v must be positive, got {self.v}")
        object.__setattr__(self, 'p', int(self.p))
        object.__setattr__(self, 'h', 1.0 / (self.p + 1))


@dataclass(frozen=True, eq=False)
class SaddlePointSystem:
    """The block system [[A, B], [-B^T, 0]] (x; y) = (f; -g).

    Validation checks shapes, n <= m, finiteness of the right-hand side, and
    probes x^T A x > 0 on 20 seeded random unit vectors.
    """

    A: SparseMatrix
    B: SparseMatrix
    f: Vector
    g: Vector

    def __post_init__(self) -> None:
        if self.A.rows != self.A.cols:
            raise InvalidDimensionError(f"A must be square, got {self.A.shape}")
        if self.B.rows != self.A.rows:
            raise InvalidDimensionError(f"B must have {self.A.rows} rows, got {self.B.rows}")
        if self.B.cols > self.A.rows:
            raise InvalidDimensionError(f"need n <= m, got n={self.B.cols}, m={self.A.rows}")

        f = np.asarray(self.f, dtype=np.float64)
        g = np.asarray(self.g, dtype=np.float64)
        if f.shape != (self.m,) or g.shape != (self.n,):
            raise InvalidDimensionError(
                f"right-hand side shapes {f.shape}, {g.shape} do not match m={self.m}, n={self.n}"
            )
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
            raise InvalidInputError("right-hand side must be finite")
        f.flags.writeable = False
        g.flags.writeable = False
        object.__setattr__(self, 'f', f)
        object.__setattr__(self, 'g', g)

        rng = np.random.default_rng(PD_PROBE_SEED)
        for _ in range(PD_PROBES):
            x = rng.standard_normal(self.m)
            x /= np.linalg.norm(x)
            if not x @ spmv(self.A, x) > 0:
                raise InvalidInputError("A is not positive definite (x^T A x <= 0 for a probe x)")

    @property
    def m(self) -> int:
        return self.A.rows

    @property
    def n(self) -> int:
        return self.B.cols

    @property
    def size(self) -> int:
        return self.m + self.n

    def matrix(self) -> SparseMatrix:
        """The assembled saddle-point matrix."""
        return assemble_saddle(self.A, self.B)

    def rhs(self) -> Vector:
        """The stacked right-hand side (f; -g)."""
        return np.concatenate([self.f, -self.g])

    def split(self, w: Vector) -> Tuple[Vector, Vector]:
        """Split a stacked vector into its (x, y) blocks."""
        return w[:self.m], w[self.m:]

    def symmetric_skew_parts(self) -> Tuple[SparseMatrix, SparseMatrix]:
        return sym_skew_split(self.A)


def convection_diffusion_1d(params: ProblemParams) -> SparseMatrix:
    """T = (v/h^2) tridiag(-1, 2, -1) + (1/(2h)) tridiag(-1, 0, 1)."""
    h = params.h
    diffusion = tridiag(params.p, -1.0, 2.0, -1.0) * (params.v / h**2)
    convection = tridiag(params.p, -1.0, 0.0, 1.0) * (1.0 / (2.0 * h))
    return diffusion + convection


def gradient_1d(params: ProblemParams) -> SparseMatrix:
    """F = (1/h) tridiag(-1, 1, 0)."""
    return tridiag(params.p, -1.0, 1.0, 0.0) * (1.0 / params.h)


def _example1_blocks(params: ProblemParams) -> Tuple[SparseMatrix, SparseMatrix]:
    identity = SparseMatrix.identity(params.p)
    t = convection_diffusion_1d(params)
    f = gradient_1d(params)

    k = kron(identity, t) + kron(t, identity)
    a = block_diag([k, k])
    b = vstack([kron(identity, f), kron(f, identity)])
    return a, b


def rhs_for_ones(a: SparseMatrix, b: SparseMatrix) -> Tuple[Vector, Vector]:
    """Right-hand side whose exact solution is all ones.

    Args:
        a: The m-by-m block A
        b: The m-by-n block B

    Returns:
        Tuple (f, g) with f = A 1 + B 1 and g = B^T 1

    Example:
        # A = diag(2, 3), B = [[1], [0]]
        rhs_for_ones(A, B)
        # Returns: (array([3., 3.]), array([1.]))
    """
    if a.rows != a.cols or b.rows != a.rows:
        raise InvalidDimensionError(f"inconsistent blocks A {a.shape}, B {b.shape}")
    f = spmv(a, np.ones(a.cols)) + spmv(b, np.ones(b.cols))
    g = spmv_t(b, np.ones(b.rows))
    return f, g


def build_example1(p: int, v: float) -> SaddlePointSystem:
    """Nonsingular benchmark with a 2p^2 x p^2 full-column-rank B.

    Args:
        p: Interior grid points per direction (>= 2)
        v: Viscosity (> 0)

    Returns:
        SaddlePointSystem with m = 2p^2, n = p^2 and an all-ones solution

    Raises:
        InvalidParameterError: If p < 2 or v <= 0
    """
    params = ProblemParams(p=p, v=v)
    a, b = _example1_blocks(params)
    f, g = rhs_for_ones(a, b)
    logger.debug("Built example 1: p=%d v=%g m=%d n=%d", params.p, params.v, a.rows, b.cols)
    return SaddlePointSystem(A=a, B=b, f=f, g=g)


def build_example2(p: int, v: float) -> SaddlePointSystem:
    """Singular benchmark: B = [B1, b1, b2] with b1, b2 in the range of B1.

    B1 is the constraint block of example 1. With e the all-ones vector of
    length p^2/2, b1 = B1 (e; 0) and b2 = B1 (0; e). The grid count must be
    even so that p^2/2 is an integer.

    Raises:
        InvalidParameterError: If p is odd, p < 2 or v <= 0
    """
    params = ProblemParams(p=p, v=v)
    if params.p % 2:
        raise InvalidParameterError(f"example 2 needs an even grid count, got p={params.p}")
    a, b_hat = _example1_blocks(params)

    half = params.p**2 // 2
    first = np.concatenate([np.ones(half), np.zeros(half)])
    second = np.concatenate([np.zeros(half), np.ones(half)])
    b = hstack([b_hat, column(spmv(b_hat, first)), column(spmv(b_hat, second))])

    f, g = rhs_for_ones(a, b)
    logger.debug("Built example 2: p=%d v=%g m=%d n=%d", params.p, params.v, a.rows, b.cols)
    return SaddlePointSystem(A=a, B=b, f=f, g=g)


def build_example(example: int, p: int, v: float) -> SaddlePointSystem:
    """Build benchmark ``example`` (1 or 2)."""
    if example == 1:
        return build_example1(p, v)
    if example == 2:
        return build_example2(p, v)
    raise InvalidParameterError(f"unknown example {example}; expected 1 or 2")
