"""
Shift-splitting preconditioner family for saddle-point systems.

Every member has the form

    P = s * [[F, t B], [-t B^T, beta I]]

and differs only in the scale s, the off-diagonal multiplier t, the recipe
for the first block F and whether beta is tied to alpha. Application uses the
block factorization

    P = s * [[I, (t/beta) B], [0, I]] * diag(F + (t^2/beta) B B^T, beta I)
            * [[I, 0], [-(t/beta) B^T, I]]

so that one dense factorization of the inner block serves every solve.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from enum import Enum, unique
from typing import Dict, Optional, Protocol, Union

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from core.exceptions import (
    InternalError,
    InvalidDimensionError,
    InvalidParameterError,
    NotPositiveDefiniteError,
    SingularMatrixError,
)
from core.problems import SaddlePointSystem
from linalg.dense_factor import CholFactors, LUFactors, chol_factor, chol_solve, lu_factor, lu_solve
from linalg.sparse_core import (
    DenseMatrix,
    SparseMatrix,
    gram,
    spmv,
    spmv_t,
    sym_skew_split,
    to_dense,
)

logger = logging.getLogger(__name__)


@unique
class FirstBlock(str, Enum):
    """Recipe for the (1,1) block F of the splitting matrix."""

    SHIFTED_A = "alpha_i_plus_a"
    SHIFTED_2H = "alpha_i_plus_2h"
    SHIFTED_2A = "alpha_i_plus_2a"


@dataclass(frozen=True)
class KindDescriptor:
    """Scale s, multiplier t, first-block recipe and beta tie of a family member."""

    scale: float
    multiplier: float
    first_block: FirstBlock
    tied: bool


@unique
class FamilyKind(str, Enum):
    """Members of the shift-splitting family."""

    SS = "ss"
    GSS = "gss"
    MSS = "mss"
    GMSS = "gmss"
    MSSP = "mssp"
    MGSSP = "mgssp"

    @property
    def descriptor(self) -> KindDescriptor:
        return _DESCRIPTORS[self]

    @property
    def label(self) -> str:
        return self.name


_DESCRIPTORS: Dict[FamilyKind, KindDescriptor] = {
    FamilyKind.SS: KindDescriptor(0.5, 1.0, FirstBlock.SHIFTED_A, True),
    FamilyKind.GSS: KindDescriptor(0.5, 1.0, FirstBlock.SHIFTED_A, False),
    FamilyKind.MSS: KindDescriptor(0.5, 1.0, FirstBlock.SHIFTED_2H, True),
    FamilyKind.GMSS: KindDescriptor(0.5, 1.0, FirstBlock.SHIFTED_2H, False),
    FamilyKind.MSSP: KindDescriptor(1.0, 2.0, FirstBlock.SHIFTED_2A, True),
    FamilyKind.MGSSP: KindDescriptor(1.0, 2.0, FirstBlock.SHIFTED_2A, False),
}


@dataclass(frozen=True)
class ShiftParams:
    """Shift parameters: alpha >= 0 on the (1,1) block, beta > 0 on the (2,2) block."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise InvalidParameterError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise InvalidParameterError(f"beta must be finite and > 0, got {self.beta}")
        object.__setattr__(self, 'alpha', float(self.alpha))
        object.__setattr__(self, 'beta', float(self.beta))

    @classmethod
    def for_kind(cls, kind: FamilyKind, alpha: float, beta: Optional[float] = None) -> ShiftParams:
        """Parameters as used by ``kind``: tied kinds take beta := alpha.

        Raises:
            InvalidParameterError: If a free kind has no beta, or a tied kind
                has alpha = 0 (its tied beta would vanish)
        """
        if kind.descriptor.tied:
            if beta is not None and beta != alpha:
                logger.debug("%s ties beta to alpha; ignoring beta=%g", kind.label, beta)
            if not alpha > 0:
                raise InvalidParameterError(f"{kind.label} ties beta to alpha, so alpha must be > 0")
            return cls(alpha=alpha, beta=alpha)
        if beta is None:
            raise InvalidParameterError(f"{kind.label} needs an explicit beta")
        return cls(alpha=alpha, beta=beta)


class Preconditioner(Protocol):
    """Anything that applies an approximate inverse to stacked vectors."""

    def apply(self, r: npt.ArrayLike) -> np.ndarray:
        ...


@dataclass(frozen=True, eq=False)
class ShiftSplitPreconditioner:
    """A built family member with its factorized inner block.

    Use :func:`build` to construct one.
    """

    kind: FamilyKind
    params: ShiftParams
    system: SaddlePointSystem
    first_block: SparseMatrix
    inner_factors: Union[LUFactors, CholFactors]

    @property
    def s(self) -> float:
        return self.kind.descriptor.scale

    @property
    def t(self) -> float:
        return self.kind.descriptor.multiplier

    @property
    def label(self) -> str:
        return self.kind.label

    def _inner_solve(self, rhs: np.ndarray) -> np.ndarray:
        if isinstance(self.inner_factors, CholFactors):
            return chol_solve(self.inner_factors, rhs)
        return lu_solve(self.inner_factors, rhs)

    def apply(self, r: npt.ArrayLike) -> np.ndarray:
        """Apply P^{-1} to ``r`` by block elimination.

        Args:
            r: Stacked vector (r1; r2) of length m + n, or a block of such columns

        Returns:
            z = P^{-1} r

        Raises:
            InvalidDimensionError: If r does not have m + n rows

        Example:
            # MGSSP, A = [[1]], B = [[1]], alpha = beta = 1
            precond.apply([7.0, 0.0])
            # Returns: array([1., 2.])
        """
        rhs = np.asarray(r)
        m, size = self.system.m, self.system.size
        if rhs.ndim not in (1, 2) or rhs.shape[0] != size:
            raise InvalidDimensionError(f"apply expects {size} rows, got {rhs.shape}")
        if not np.iscomplexobj(rhs):
            rhs = rhs.astype(np.float64, copy=False)

        beta, t = self.params.beta, self.t
        r1, r2 = rhs[:m], rhs[m:]
        t1 = r1 - (t / beta) * spmv(self.system.B, r2)
        z1 = self._inner_solve(t1)
        z2 = (t * spmv_t(self.system.B, z1) + r2) / beta
        return np.concatenate([z1, z2]) / self.s


def _first_block(kind: FamilyKind, system: SaddlePointSystem, alpha: float) -> SparseMatrix:
    recipe = kind.descriptor.first_block
    shift = SparseMatrix.identity(system.m) * alpha
    if recipe is FirstBlock.SHIFTED_A:
        return shift + system.A
    if recipe is FirstBlock.SHIFTED_2H:
        h, _ = sym_skew_split(system.A)
        return shift + h * 2.0
    return shift + system.A * 2.0


def _inner(kind: FamilyKind, system: SaddlePointSystem, first: SparseMatrix, beta: float) -> DenseMatrix:
    t = kind.descriptor.multiplier
    return to_dense(first) + (t * t / beta) * to_dense(gram(system.B))


def inner_matrix(kind: FamilyKind, system: SaddlePointSystem, params: ShiftParams) -> DenseMatrix:
    """Dense inner block F + (t^2/beta) B B^T, with beta tied for tied kinds."""
    effective = ShiftParams.for_kind(kind, params.alpha, params.beta)
    return _inner(kind, system, _first_block(kind, system, effective.alpha), effective.beta)


def build(
    kind: FamilyKind,
    system: SaddlePointSystem,
    params: ShiftParams,
) -> ShiftSplitPreconditioner:
    """Assemble and factorize the inner block of a family member.

    For tied kinds the given beta is replaced by alpha. The inner block of
    MSS and GMSS is symmetric positive definite and uses Cholesky; all other
    kinds use LU with partial pivoting.

    Args:
        kind: Family member to build
        system: Saddle-point system the preconditioner is built for
        params: Shift parameters

    Returns:
        ShiftSplitPreconditioner ready for repeated :meth:`apply` calls

    Raises:
        InvalidParameterError: If a tied kind is given alpha = 0
        InternalError: If the inner block turns out singular or indefinite
    """
    effective = ShiftParams.for_kind(kind, params.alpha, params.beta)
    started = time.perf_counter()
    first = _first_block(kind, system, effective.alpha)
    inner = _inner(kind, system, first, effective.beta)

    try:
        if kind.descriptor.first_block is FirstBlock.SHIFTED_2H:
            inner = 0.5 * (inner + inner.T)
            factors: Union[LUFactors, CholFactors] = chol_factor(inner)
        else:
            factors = lu_factor(inner)
    except (SingularMatrixError, NotPositiveDefiniteError) as e:
        raise InternalError(
            f"{kind.label} inner block failed to factorize for "
            f"alpha={effective.alpha:g}, beta={effective.beta:g}: {e}"
        ) from e

    logger.debug(
        "Built %s preconditioner (alpha=%g, beta=%g, inner %d) in %.1f ms",
        kind.label, effective.alpha, effective.beta, inner.shape[0],
        1000.0 * (time.perf_counter() - started),
    )
    return ShiftSplitPreconditioner(
        kind=kind,
        params=effective,
        system=system,
        first_block=first,
        inner_factors=factors,
    )


def assemble_P(precond: ShiftSplitPreconditioner) -> DenseMatrix:
    """Dense splitting matrix s * [[F, t B], [-t B^T, beta I]]."""
    system = precond.system
    first = precond.first_block.csr
    if system.n == 0:
        return to_dense(SparseMatrix.from_scipy(first * precond.s))
    b = system.B.csr
    blocks = [
        [first, precond.t * b],
        [-precond.t * b.T, precond.params.beta * sp.identity(system.n, format="csr")],
    ]
    return to_dense(SparseMatrix.from_scipy(sp.bmat(blocks, format="csr") * precond.s))


def assemble_Q(
    precond: ShiftSplitPreconditioner,
    system: Optional[SaddlePointSystem] = None,
) -> DenseMatrix:
    """Dense Q = P - saddle matrix; the stationary iteration reads P w' = Q w + b."""
    target = precond.system if system is None else system
    if target.size != precond.system.size:
        raise InvalidDimensionError(
            f"system of size {target.size} does not match preconditioner of size {precond.system.size}"
        )
    return assemble_P(precond) - to_dense(target.matrix())
