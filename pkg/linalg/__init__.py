"""Linear-algebra primitives: sparse storage, dense factorizations and rank."""

from linalg.dense_factor import (
    CholFactors,
    LUFactors,
    chol_factor,
    chol_solve,
    lu_factor,
    lu_solve,
    numerical_rank,
)
from linalg.sparse_core import (
    SparseMatrix,
    assemble_saddle,
    kron,
    spmv,
    spmv_t,
    sym_skew_split,
    to_dense,
    tridiag,
)

__all__ = [
    'CholFactors',
    'LUFactors',
    'SparseMatrix',
    'assemble_saddle',
    'chol_factor',
    'chol_solve',
    'kron',
    'lu_factor',
    'lu_solve',
    'numerical_rank',
    'spmv',
    'spmv_t',
    'sym_skew_split',
    'to_dense',
    'tridiag',
]
