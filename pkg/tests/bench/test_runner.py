"""Tests for single runs and parameter sweeps."""

import math

import numpy as np
import pytest

from bench.models import RunSpec, SpectrumKind
from bench.runner import run, run_many, sweep
from bench.schemas import EigenvalueCSVSchema, HistoryCSVSchema, SummaryCSVSchema
from core.exceptions import InternalError, UsageError
from core.preconditioners import FamilyKind
from core.solvers import SolverKind


@pytest.fixture
def small_spec():
    """MGSSP-GMRES on example 1 with a 4x4 grid."""
    return RunSpec(example=1, p=4, v=1.0, kind=FamilyKind.MGSSP, alpha=0.6, beta=0.8)


def _load(schema, path):
    with open(path, newline="") as handle:
        return schema.load_from_csv(handle)


class TestRun:
    """One experiment."""

    def test_summary(self, small_spec):
        """The returned row describes a converged run."""
        row = run(small_spec)
        assert row.method == "MGSSP-GMRES"
        assert row.converged
        assert 0 < row.iterations <= 48
        assert row.res < 1e-6
        assert (row.alpha, row.beta) == (0.6, 0.8)

    def test_output_files(self, small_spec, tmp_path):
        """Summary, history and eigenvalue files are written and parse back."""
        spec = RunSpec(
            example=1, p=4, v=1.0, kind=FamilyKind.MGSSP, alpha=0.6, beta=0.8,
            summary_path=tmp_path / "out" / "summary.csv",
            history_path=tmp_path / "history.csv",
            eigs_path=tmp_path / "eigs.csv",
        )
        row = run(spec)

        assert _load(SummaryCSVSchema(), spec.summary_path) == [row]
        history = _load(HistoryCSVSchema(), spec.history_path)
        assert [h.step for h in history] == list(range(row.iterations + 1))
        assert history[0].res == pytest.approx(1.0)
        assert all(b.res <= a.res for a, b in zip(history, history[1:]))
        eigs = _load(EigenvalueCSVSchema(), spec.eigs_path)
        assert len(eigs) == 48
        assert all(e.re > 0 for e in eigs)

    def test_iteration_spectrum(self, tmp_path):
        """The iteration-matrix spectrum lies inside the unit disc."""
        spec = RunSpec(
            example=1, p=4, v=1.0, kind=FamilyKind.MGSSP, solver=SolverKind.STATIONARY,
            alpha=0.2, beta=0.1, eigs_path=tmp_path / "t.csv", spectrum=SpectrumKind.ITERATION,
        )
        assert run(spec).converged
        eigs = _load(EigenvalueCSVSchema(), spec.eigs_path)
        assert max(math.hypot(e.re, e.im) for e in eigs) < 1.0

    def test_unpreconditioned_spectrum(self, tmp_path):
        """Without a preconditioner the saddle matrix spectrum is written."""
        spec = RunSpec(example=1, p=4, v=1.0, kind=None, eigs_path=tmp_path / "k.csv")
        row = run(spec)
        assert row.method == "GMRES"
        assert row.alpha is None and row.beta is None
        assert len(_load(EigenvalueCSVSchema(), spec.eigs_path)) == 48

    def test_spectral_size_guard(self, tmp_path):
        """Eigenvalue output above the size cap is a usage error."""
        spec = RunSpec(example=1, p=10, v=1.0, eigs_path=tmp_path / "eigs.csv")
        with pytest.raises(UsageError):
            run(spec, spectral_max_p=8)
        assert not (tmp_path / "eigs.csv").exists()

    def test_deterministic(self, small_spec):
        """Repeated runs give identical rows apart from the timing."""
        first, second = run(small_spec), run(small_spec)
        assert (first.iterations, first.res) == (second.iterations, second.res)

    def test_not_converged(self):
        """Hitting the cap is a normal, non-converged row."""
        row = run(RunSpec(example=1, p=4, v=1.0, kind=None, max_iterations=3))
        assert not row.converged
        assert row.iterations == 3
        assert not row.failed

    def test_numerical_failure(self, small_spec, tmp_path, monkeypatch):
        """A failing build records a diagnostic row before re-raising."""
        def broken(*_):
            raise InternalError("inner block failed")

        monkeypatch.setattr("bench.runner.build", broken)
        spec = RunSpec(example=1, p=4, v=1.0, alpha=0.6, beta=0.8, summary_path=tmp_path / "s.csv")
        with pytest.raises(InternalError):
            run(spec)
        (row,) = _load(SummaryCSVSchema(), spec.summary_path)
        assert row.failed and math.isnan(row.res)

        row = run(spec, raise_on_failure=False)
        assert row.iterations == -1

    def test_run_many_preserves_order(self):
        """Results come back in input order with a thread pool."""
        specs = [RunSpec(example=1, p=4, v=1.0, kind=kind, alpha=0.6, beta=0.8)
                 for kind in (FamilyKind.GSS, None, FamilyKind.MGSSP)]
        rows = run_many(specs, workers=3)
        assert [r.method for r in rows] == ["GSS-GMRES", "GMRES", "MGSSP-GMRES"]


class TestSweep:
    """Cartesian parameter sweeps."""

    def test_grid_and_order(self, tmp_path):
        """Rows are sorted by kind, alpha and beta with plain GMRES first."""
        base = RunSpec(example=1, p=4, v=1.0, kind=None, summary_path=tmp_path / "sweep.csv")
        rows = sweep(base, [1.0, 0.5], [0.8, 0.4], [FamilyKind.MGSSP, None, FamilyKind.GSS], workers=2)

        assert [r.method for r in rows] == ["GMRES"] + ["GSS-GMRES"] * 4 + ["MGSSP-GMRES"] * 4
        assert [(r.alpha, r.beta) for r in rows[1:5]] == [(0.5, 0.4), (0.5, 0.8), (1.0, 0.4), (1.0, 0.8)]
        assert _load(SummaryCSVSchema(), base.summary_path) == rows

    def test_tied_kinds_run_once_per_alpha(self):
        """SS ignores the beta grid."""
        base = RunSpec(example=1, p=4, v=1.0, kind=None)
        rows = sweep(base, [0.5, 1.0], [0.1, 0.2, 0.3], [FamilyKind.SS])
        assert [(r.alpha, r.beta) for r in rows] == [(0.5, 0.5), (1.0, 1.0)]

    def test_beta_equals_alpha(self):
        """All kinds can be tied for an alpha = beta curve."""
        base = RunSpec(example=1, p=4, v=1.0, kind=None)
        rows = sweep(base, [0.5, 1.0], [], [FamilyKind.GMSS], beta_equals_alpha=True)
        assert [(r.alpha, r.beta) for r in rows] == [(0.5, 0.5), (1.0, 1.0)]

    def test_invalid_points_skipped(self, caplog):
        """alpha = 0 is skipped for tied kinds and kept for free ones."""
        base = RunSpec(example=1, p=4, v=1.0, kind=None)
        rows = sweep(base, [0.0, 1.0], [1.0], [FamilyKind.SS, FamilyKind.MGSSP])
        assert [(r.method, r.alpha) for r in rows] == [("SS-GMRES", 1.0), ("MGSSP-GMRES", 0.0), ("MGSSP-GMRES", 1.0)]
        assert "Skipping SS" in caplog.text

    def test_single_point_matches_run(self, small_spec):
        """A one-point sweep is a single run."""
        (row,) = sweep(small_spec, [0.6], [0.8], [FamilyKind.MGSSP])
        expected = run(small_spec)
        assert (row.iterations, row.res) == (expected.iterations, expected.res)

    @pytest.mark.parametrize("alphas,betas,kinds", [
        ([1.0], [1.0], []),
        ([], [1.0], [FamilyKind.MGSSP]),
        ([1.0], [], [FamilyKind.MGSSP]),
    ])
    def test_empty_grids(self, alphas, betas, kinds):
        """Empty kind lists and grids are usage errors."""
        base = RunSpec(example=1, p=4, v=1.0)
        with pytest.raises(UsageError):
            sweep(base, alphas, betas, kinds)

    def test_stationary_sweep_on_singular_problem(self):
        """Stationary sweeps on the singular benchmark converge at every point."""
        base = RunSpec(example=2, p=4, v=0.1, kind=FamilyKind.MGSSP, solver=SolverKind.STATIONARY)
        rows = sweep(base, [0.02, 0.5], [0.1], [FamilyKind.MGSSP])
        assert all(r.converged and not r.failed for r in rows)
        assert np.all([r.method == "MGSSP" for r in rows])
