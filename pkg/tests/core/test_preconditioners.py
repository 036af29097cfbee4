"""Tests for the shift-splitting preconditioner family."""

import numpy as np
import pytest

from core.exceptions import InternalError, InvalidDimensionError, InvalidParameterError, SingularMatrixError
from core.preconditioners import (
    FamilyKind,
    FirstBlock,
    ShiftParams,
    assemble_P,
    assemble_Q,
    build,
    inner_matrix,
)
from linalg.dense_factor import CholFactors, LUFactors
from linalg.sparse_core import to_dense

ALL_KINDS = list(FamilyKind)


def _params(kind, alpha=1.0, beta=0.5):
    return ShiftParams.for_kind(kind, alpha, beta)


class TestShiftParams:
    """Parameter validation and beta tying."""

    def test_valid(self):
        """alpha >= 0 and beta > 0 are accepted."""
        params = ShiftParams(alpha=0.0, beta=2.0)
        assert params.alpha == 0.0
        assert params.beta == 2.0

    @pytest.mark.parametrize("alpha,beta", [(-1.0, 1.0), (1.0, 0.0), (1.0, -2.0), (np.inf, 1.0)])
    def test_invalid(self, alpha, beta):
        """Negative alpha, non-positive beta and infinities raise."""
        with pytest.raises(InvalidParameterError):
            ShiftParams(alpha=alpha, beta=beta)

    @pytest.mark.parametrize("kind", [FamilyKind.SS, FamilyKind.MSS, FamilyKind.MSSP])
    def test_tied_kinds_ignore_beta(self, kind):
        """Tied kinds use beta = alpha whatever beta is given."""
        params = ShiftParams.for_kind(kind, 0.7, 5.0)
        assert params.beta == 0.7
        assert ShiftParams.for_kind(kind, 0.7).beta == 0.7

    def test_tied_kind_rejects_zero_alpha(self):
        """A tied kind with alpha = 0 would have beta = 0."""
        with pytest.raises(InvalidParameterError):
            ShiftParams.for_kind(FamilyKind.SS, 0.0, 1.0)

    def test_free_kind_needs_beta(self):
        """Free kinds require an explicit beta."""
        with pytest.raises(InvalidParameterError):
            ShiftParams.for_kind(FamilyKind.MGSSP, 1.0)
        assert ShiftParams.for_kind(FamilyKind.MGSSP, 0.0, 0.1).alpha == 0.0


class TestFamilyKind:
    """The descriptor table."""

    def test_descriptors(self):
        """Scale, multiplier, first block and tie of each member."""
        assert FamilyKind.SS.descriptor.scale == 0.5
        assert FamilyKind.SS.descriptor.first_block is FirstBlock.SHIFTED_A
        assert FamilyKind.GMSS.descriptor.first_block is FirstBlock.SHIFTED_2H
        assert not FamilyKind.GMSS.descriptor.tied
        mgssp = FamilyKind.MGSSP.descriptor
        assert (mgssp.scale, mgssp.multiplier, mgssp.first_block, mgssp.tied) == (
            1.0, 2.0, FirstBlock.SHIFTED_2A, False
        )
        assert FamilyKind.MSSP.descriptor.tied

    def test_labels(self):
        """Labels are the upper-case names."""
        assert [k.label for k in FamilyKind] == ["SS", "GSS", "MSS", "GMSS", "MSSP", "MGSSP"]


class TestAssembly:
    """Dense P and Q."""

    def test_mgssp_splitting(self, nonsymmetric_system):
        """MGSSP P = [[aI + 2A, 2B], [-2B^T, bI]] and Q = [[aI + A, B], [-B^T, bI]]."""
        precond = build(FamilyKind.MGSSP, nonsymmetric_system, ShiftParams(0.5, 2.0))
        a = to_dense(nonsymmetric_system.A)
        b = to_dense(nonsymmetric_system.B)
        expected_p = np.block([[0.5 * np.eye(2) + 2 * a, 2 * b], [-2 * b.T, 2.0 * np.eye(1)]])
        expected_q = np.block([[0.5 * np.eye(2) + a, b], [-b.T, 2.0 * np.eye(1)]])
        np.testing.assert_allclose(assemble_P(precond), expected_p)
        np.testing.assert_allclose(assemble_Q(precond), expected_q)

    def test_ss_splitting(self, nonsymmetric_system):
        """SS P = 1/2 [[aI + A, B], [-B^T, aI]]."""
        precond = build(FamilyKind.SS, nonsymmetric_system, ShiftParams(0.3, 9.0))
        a = to_dense(nonsymmetric_system.A)
        b = to_dense(nonsymmetric_system.B)
        expected = 0.5 * np.block([[0.3 * np.eye(2) + a, b], [-b.T, 0.3 * np.eye(1)]])
        np.testing.assert_allclose(assemble_P(precond), expected)

    def test_mss_first_block(self, system_factory):
        """MSS uses aI + 2H with H the symmetric part of A."""
        system = system_factory([[2.0, 1.0], [3.0, 2.0]], [[1.0], [0.0]])
        precond = build(FamilyKind.MSS, system, ShiftParams(1.0, 1.0))
        np.testing.assert_allclose(to_dense(precond.first_block), [[5.0, 4.0], [4.0, 5.0]])
        assert isinstance(precond.inner_factors, CholFactors)

    def test_factorization_identity(self, example1_p4):
        """P equals s * [[I, (t/b) B], [0, I]] diag(inner, bI) [[I, 0], [-(t/b) B^T, I]]."""
        for kind in ALL_KINDS:
            params = _params(kind, 0.8, 1.7)
            precond = build(kind, example1_p4, params)
            m, n = example1_p4.m, example1_p4.n
            b = to_dense(example1_p4.B)
            beta, t = precond.params.beta, precond.t
            upper = np.block([[np.eye(m), (t / beta) * b], [np.zeros((n, m)), np.eye(n)]])
            middle = np.block([
                [inner_matrix(kind, example1_p4, params), np.zeros((m, n))],
                [np.zeros((n, m)), beta * np.eye(n)],
            ])
            lower = np.block([[np.eye(m), np.zeros((m, n))], [-(t / beta) * b.T, np.eye(n)]])
            product = precond.s * upper @ middle @ lower
            p = assemble_P(precond)
            assert np.abs(product - p).max() <= 1e-12 * np.abs(p).max()

    def test_q_is_p_minus_saddle(self, example1_p4):
        """Q = P - K."""
        precond = build(FamilyKind.GSS, example1_p4, ShiftParams(1.0, 2.0))
        np.testing.assert_allclose(
            assemble_P(precond) - assemble_Q(precond), to_dense(example1_p4.matrix()), atol=1e-10
        )

    def test_q_size_mismatch(self, example1_p4, nonsymmetric_system):
        """Q needs a system of the preconditioner's size."""
        precond = build(FamilyKind.MGSSP, nonsymmetric_system, ShiftParams(1.0, 1.0))
        with pytest.raises(InvalidDimensionError):
            assemble_Q(precond, example1_p4)


class TestApply:
    """Block-elimination application of P^{-1}."""

    def test_scalar_example(self, scalar_system):
        """MGSSP with A = B = [[1]] and alpha = beta = 1 maps (7, 0) to (1, 2)."""
        precond = build(FamilyKind.MGSSP, scalar_system, ShiftParams(1.0, 1.0))
        np.testing.assert_allclose(precond.apply([7.0, 0.0]), [1.0, 2.0])

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_matches_dense_solve(self, kind, example1_p4, rng):
        """apply(r) agrees with a dense solve of P z = r."""
        precond = build(kind, example1_p4, _params(kind, 0.6, 0.8))
        r = rng.standard_normal(example1_p4.size)
        expected = np.linalg.solve(assemble_P(precond), r)
        z = precond.apply(r)
        assert np.linalg.norm(z - expected) <= 1e-9 * np.linalg.norm(expected)

    def test_singular_example_matches_dense_solve(self, example2_p4, rng):
        """P stays nonsingular for the rank-deficient benchmark."""
        precond = build(FamilyKind.MGSSP, example2_p4, ShiftParams(0.02, 0.1))
        r = rng.standard_normal(example2_p4.size)
        expected = np.linalg.solve(assemble_P(precond), r)
        assert np.linalg.norm(precond.apply(r) - expected) <= 1e-9 * np.linalg.norm(expected)

    def test_block_and_complex(self, nonsymmetric_system, rng):
        """Blocks of columns and complex vectors are supported."""
        precond = build(FamilyKind.GMSS, nonsymmetric_system, ShiftParams(1.0, 3.0))
        p = assemble_P(precond)
        block = rng.standard_normal((3, 4))
        np.testing.assert_allclose(p @ precond.apply(block), block, atol=1e-12)
        z = np.array([1 + 2j, -1j, 0.5])
        np.testing.assert_allclose(p @ precond.apply(z), z, atol=1e-12)

    def test_wrong_length(self, nonsymmetric_system):
        """Vectors must have m + n entries."""
        precond = build(FamilyKind.MGSSP, nonsymmetric_system, ShiftParams(1.0, 1.0))
        with pytest.raises(InvalidDimensionError):
            precond.apply(np.ones(2))

    def test_factor_choice(self, example1_p4):
        """MSS and GMSS use Cholesky, the other members LU."""
        for kind in ALL_KINDS:
            precond = build(kind, example1_p4, _params(kind))
            expected = CholFactors if kind in (FamilyKind.MSS, FamilyKind.GMSS) else LUFactors
            assert isinstance(precond.inner_factors, expected)

    def test_factorization_failure(self, nonsymmetric_system, monkeypatch):
        """A failing inner factorization is reported as an internal error."""
        def singular(_):
            raise SingularMatrixError("zero pivot")

        monkeypatch.setattr("core.preconditioners.lu_factor", singular)
        with pytest.raises(InternalError):
            build(FamilyKind.MGSSP, nonsymmetric_system, ShiftParams(1.0, 1.0))

    def test_tied_build_uses_alpha(self, nonsymmetric_system):
        """A tied kind built with another beta stores beta = alpha."""
        precond = build(FamilyKind.MSSP, nonsymmetric_system, ShiftParams(2.0, 7.0))
        assert precond.params == ShiftParams(2.0, 2.0)
        assert precond.label == "MSSP"

    @pytest.mark.parametrize("tied,free", [
        (FamilyKind.MSSP, FamilyKind.MGSSP),
        (FamilyKind.SS, FamilyKind.GSS),
        (FamilyKind.MSS, FamilyKind.GMSS),
    ])
    @pytest.mark.parametrize("alpha", [0.1, 1.0, 10.0])
    def test_tied_matches_free_with_equal_shifts(self, example1_p4, rng, tied, free, alpha):
        """A tied member is its free counterpart with beta = alpha."""
        r = rng.standard_normal(example1_p4.size)
        z_tied = build(tied, example1_p4, ShiftParams(alpha, alpha)).apply(r)
        z_free = build(free, example1_p4, ShiftParams(alpha, alpha)).apply(r)
        assert np.linalg.norm(z_tied - z_free) <= 1e-14 * np.linalg.norm(z_free)
