"""Sparse and dense matrix primitives.

The sparse type stores a matrix in compressed sparse row form with sorted
column indices and no explicit zeros. It wraps a canonical
``scipy.sparse.csr_matrix`` so products and block assembly run on the scipy
kernels, while the wrapper enforces the storage invariants and keeps the
arrays read-only.
"""

from __future__ import annotations

import logging
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from core.exceptions import InvalidDimensionError, InvalidInputError, ResourceLimitError

logger = logging.getLogger(__name__)

DenseMatrix = npt.NDArray[np.float64]
Vector = npt.NDArray[np.float64]
ComplexList = npt.NDArray[np.complex128]

# Largest dense copy allowed by to_dense (entries).
DENSE_ENTRY_LIMIT = 10**8

# Sparse indices are stored as int64; products of dimensions must fit.
_INDEX_LIMIT = np.iinfo(np.int64).max


class SparseMatrix:
    """Immutable real matrix in canonical compressed sparse row form."""

    __slots__ = ("_csr",)

    def __init__(
        self,
        rows: int,
        cols: int,
        row_starts: Sequence[int],
        col_indices: Sequence[int],
        values: Sequence[float],
    ) -> None:
        """Build a matrix from raw CSR arrays, validating every invariant.

        Args:
            rows: Number of rows
            cols: Number of columns
            row_starts: Offsets of each row into ``col_indices``/``values``
            col_indices: Column index of every stored value
            values: Stored values

        Raises:
            InvalidDimensionError: If the arrays are inconsistent with the shape
            InvalidInputError: If a value is not finite
        """
        if rows < 0 or cols < 0:
            raise InvalidDimensionError(f"negative shape ({rows}, {cols})")
        starts = np.asarray(row_starts, dtype=np.int64)
        indices = np.asarray(col_indices, dtype=np.int64)
        data = np.asarray(values, dtype=np.float64)

        if starts.shape != (rows + 1,):
            raise InvalidDimensionError("row_starts must have length rows + 1")
        if starts[0] != 0 or starts[-1] != data.size or indices.size != data.size:
            raise InvalidDimensionError("row_starts does not match the stored values")
        if np.any(np.diff(starts) < 0):
            raise InvalidDimensionError("row_starts must be non-decreasing")
        if indices.size and (indices.min() < 0 or indices.max() >= cols):
            raise InvalidDimensionError("column index out of range")
        for i in range(rows):
            row = indices[starts[i]:starts[i + 1]]
            if np.any(np.diff(row) <= 0):
                raise InvalidDimensionError(
                    f"column indices of row {i} are not strictly increasing"
                )
        if not np.all(np.isfinite(data)):
            raise InvalidInputError("stored values must be finite")

        csr = sp.csr_matrix((data, indices, starts), shape=(rows, cols))
        csr.eliminate_zeros()
        self._csr = _freeze(csr)

    @classmethod
    def from_scipy(cls, matrix: Union[sp.spmatrix, npt.ArrayLike]) -> SparseMatrix:
        """Wrap any scipy sparse matrix or dense array, canonicalizing it."""
        if sp.issparse(matrix):
            csr = sp.csr_matrix(matrix, dtype=np.float64, copy=True)
        else:
            dense = np.asarray(matrix, dtype=np.float64)
            if dense.ndim != 2:
                raise InvalidDimensionError("expected a two-dimensional array")
            csr = sp.csr_matrix(dense)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        if not np.all(np.isfinite(csr.data)):
            raise InvalidInputError("stored values must be finite")
        instance = cls.__new__(cls)
        instance._csr = _freeze(csr)
        return instance

    @classmethod
    def identity(cls, n: int) -> SparseMatrix:
        return cls.from_scipy(sp.identity(n, format="csr"))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> SparseMatrix:
        return cls.from_scipy(sp.csr_matrix((rows, cols)))

    @property
    def rows(self) -> int:
        return int(self._csr.shape[0])

    @property
    def cols(self) -> int:
        return int(self._csr.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return int(self._csr.nnz)

    @property
    def row_starts(self) -> npt.NDArray[np.int64]:
        return self._csr.indptr

    @property
    def col_indices(self) -> npt.NDArray[np.int64]:
        return self._csr.indices

    @property
    def values(self) -> Vector:
        return self._csr.data

    @property
    def csr(self) -> sp.csr_matrix:
        """The underlying read-only scipy matrix."""
        return self._csr

    @property
    def T(self) -> SparseMatrix:
        return SparseMatrix.from_scipy(self._csr.T)

    def __add__(self, other: SparseMatrix) -> SparseMatrix:
        _require_same_shape(self, other)
        return SparseMatrix.from_scipy(self._csr + other._csr)

    def __sub__(self, other: SparseMatrix) -> SparseMatrix:
        _require_same_shape(self, other)
        return SparseMatrix.from_scipy(self._csr - other._csr)

    def __neg__(self) -> SparseMatrix:
        return SparseMatrix.from_scipy(-self._csr)

    def __mul__(self, scalar: float) -> SparseMatrix:
        return SparseMatrix.from_scipy(self._csr * float(scalar))

    __rmul__ = __mul__

    def __matmul__(self, x: npt.ArrayLike) -> npt.NDArray:
        return spmv(self, x)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_starts, other.row_starts)
            and np.array_equal(self.col_indices, other.col_indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def _freeze(csr: sp.csr_matrix) -> sp.csr_matrix:
    csr.indptr = csr.indptr.astype(np.int64)
    csr.indices = csr.indices.astype(np.int64)
    for array in (csr.data, csr.indices, csr.indptr):
        array.flags.writeable = False
    return csr


def _require_same_shape(a: SparseMatrix, b: SparseMatrix) -> None:
    if a.shape != b.shape:
        raise InvalidDimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


def tridiag(n: int, lo: float, di: float, up: float) -> SparseMatrix:
    """Build the n-by-n tridiagonal matrix with constant diagonals.

    Args:
        n: Matrix order
        lo: Value on the subdiagonal
        di: Value on the diagonal
        up: Value on the superdiagonal

    Returns:
        The tridiagonal matrix; zero diagonals are not stored

    Raises:
        InvalidDimensionError: If n is less than 1

    Example:
        tridiag(3, -1, 2, -1) is [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    """
    if n < 1:
        raise InvalidDimensionError(f"tridiag order must be >= 1, got {n}")
    main = np.arange(n)
    off = np.arange(n - 1)
    row = np.concatenate([off + 1, main, off])
    col = np.concatenate([off, main, off + 1])
    data = np.concatenate([np.full(n - 1, lo), np.full(n, di), np.full(n - 1, up)])
    return SparseMatrix.from_scipy(sp.coo_matrix((data, (row, col)), shape=(n, n)))


def kron(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """Kronecker product; entry (i*rB + k, j*cB + l) equals a[i, j] * b[k, l].

    Raises:
        InvalidDimensionError: If an operand is empty or the result shape overflows
    """
    if a.rows * a.cols == 0 or b.rows * b.cols == 0:
        raise InvalidDimensionError("kron operands must be non-empty")
    rows = a.rows * b.rows
    cols = a.cols * b.cols
    if rows > _INDEX_LIMIT // max(cols, 1):
        raise InvalidDimensionError(f"kron result {rows}x{cols} overflows the index range")
    return SparseMatrix.from_scipy(sp.kron(a.csr, b.csr, format="csr"))


def spmv(m: SparseMatrix, x: npt.ArrayLike) -> npt.NDArray:
    """Sparse matrix-vector product ``m @ x``.

    ``x`` may also be a two-dimensional block of column vectors.
    """
    vec = np.asarray(x)
    if vec.shape[:1] != (m.cols,):
        raise InvalidDimensionError(
            f"spmv expects {m.cols} entries, got {vec.shape[0] if vec.ndim else 0}"
        )
    return np.asarray(m.csr @ vec)


def spmv_t(m: SparseMatrix, x: npt.ArrayLike) -> npt.NDArray:
    """Transposed product ``m.T @ x`` without materializing the transpose."""
    vec = np.asarray(x)
    if vec.shape[:1] != (m.rows,):
        raise InvalidDimensionError(
            f"spmv_t expects {m.rows} entries, got {vec.shape[0] if vec.ndim else 0}"
        )
    # The transpose of a CSR matrix is a CSC view over the same arrays.
    return np.asarray(m.csr.T @ vec)


def sym_skew_split(a: SparseMatrix) -> Tuple[SparseMatrix, SparseMatrix]:
    """Split a square matrix into its symmetric and skew-symmetric parts.

    Returns:
        Tuple (H, S) with H = (A + A^T) / 2 and S = (A - A^T) / 2

    Raises:
        InvalidDimensionError: If the matrix is not square
    """
    if a.rows != a.cols:
        raise InvalidDimensionError(f"sym_skew_split needs a square matrix, got {a.shape}")
    csr, csr_t = a.csr, a.csr.T
    h = SparseMatrix.from_scipy((csr + csr_t) * 0.5)
    s = SparseMatrix.from_scipy((csr - csr_t) * 0.5)
    return h, s


def hstack(blocks: Iterable[SparseMatrix]) -> SparseMatrix:
    return SparseMatrix.from_scipy(sp.hstack([b.csr for b in blocks], format="csr"))


def vstack(blocks: Iterable[SparseMatrix]) -> SparseMatrix:
    return SparseMatrix.from_scipy(sp.vstack([b.csr for b in blocks], format="csr"))


def block_diag(blocks: Iterable[SparseMatrix]) -> SparseMatrix:
    return SparseMatrix.from_scipy(sp.block_diag([b.csr for b in blocks], format="csr"))


def column(values: npt.ArrayLike) -> SparseMatrix:
    """A single-column sparse matrix holding ``values``."""
    vec = np.asarray(values, dtype=np.float64).reshape(-1, 1)
    return SparseMatrix.from_scipy(sp.csr_matrix(vec))


def gram(b: SparseMatrix) -> SparseMatrix:
    """The outer Gram matrix ``B @ B.T`` needed by the inner shift-splitting block."""
    return SparseMatrix.from_scipy(b.csr @ b.csr.T)


def assemble_saddle(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """Assemble the block saddle-point matrix [[A, B], [-B^T, 0]].

    Raises:
        InvalidDimensionError: If A is not square or B has a different row count
    """
    if a.rows != a.cols:
        raise InvalidDimensionError(f"A must be square, got {a.shape}")
    if b.rows != a.rows:
        raise InvalidDimensionError(f"B must have {a.rows} rows, got {b.rows}")
    if b.cols == 0:
        return a
    blocks = [[a.csr, b.csr], [-b.csr.T, None]]
    return SparseMatrix.from_scipy(sp.bmat(blocks, format="csr"))


def to_dense(m: SparseMatrix, limit: Optional[int] = None) -> DenseMatrix:
    """Dense copy of a sparse matrix, guarded against oversized allocations.

    Raises:
        ResourceLimitError: If rows * cols exceeds ``limit`` (default 10**8 entries)
    """
    budget = DENSE_ENTRY_LIMIT if limit is None else limit
    entries = m.rows * m.cols
    if entries > budget:
        raise ResourceLimitError(
            f"dense copy of {m.rows}x{m.cols} exceeds the {budget} entry budget"
        )
    logger.debug("Densifying %dx%d matrix (%d stored values)", m.rows, m.cols, m.nnz)
    return m.csr.toarray()
