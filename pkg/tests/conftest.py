"""Test fixtures and configuration."""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from core.problems import SaddlePointSystem, build_example1, build_example2, rhs_for_ones
from linalg.sparse_core import SparseMatrix


@pytest.fixture(scope="session")
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield Path(tmp_dir)


def make_system(a, b) -> SaddlePointSystem:
    """Build a system from dense blocks with the all-ones solution."""
    a_sparse = SparseMatrix.from_scipy(np.asarray(a, dtype=float))
    b_sparse = b if isinstance(b, SparseMatrix) else SparseMatrix.from_scipy(np.asarray(b, dtype=float))
    f, g = rhs_for_ones(a_sparse, b_sparse)
    return SaddlePointSystem(A=a_sparse, B=b_sparse, f=f, g=g)


@pytest.fixture
def system_factory():
    """Factory building small systems from dense blocks."""
    return make_system


@pytest.fixture
def scalar_system():
    """A = [[1]], B = [[1]]."""
    return make_system([[1.0]], [[1.0]])


@pytest.fixture
def nonsymmetric_system():
    """A = [[2, 1], [-1, 2]] with a single constraint column."""
    return make_system([[2.0, 1.0], [-1.0, 2.0]], [[1.0], [0.5]])


@pytest.fixture(scope="session")
def example1_p4():
    """Example 1 on a 4x4 grid with v = 1 (m = 32, n = 16)."""
    return build_example1(4, 1.0)


@pytest.fixture(scope="session")
def example2_p4():
    """Example 2 on a 4x4 grid with v = 0.1 (m = 32, n = 18)."""
    return build_example2(4, 0.1)


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(2024)
