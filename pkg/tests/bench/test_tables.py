"""Tests for the reference tables and their reproduction."""

import pytest

from bench.models import SummaryRow
from bench.tables import TABLES, TableEntry, acceptance_margin, compare, table_repro
from core.exceptions import UsageError
from core.preconditioners import FamilyKind
from core.solvers import SolverKind


def _row(iterations, converged=True, method="MGSSP-GMRES"):
    return SummaryRow(
        method=method, example=1, p=16, v=1.0, alpha=0.6, beta=0.8,
        iterations=iterations, res=1e-7 if converged else 1e-3, converged=converged, time_ms=1.0,
    )


class TestReferenceData:
    """Shape of the stored tables."""

    def test_all_tables_present(self):
        """Tables 1 to 8 use the right example and solver."""
        assert sorted(TABLES) == list(range(1, 9))
        assert [TABLES[i].example for i in range(1, 9)] == [1, 1, 1, 1, 2, 2, 2, 2]
        assert TABLES[1].solver is SolverKind.STATIONARY
        assert TABLES[5].solver is SolverKind.STATIONARY
        assert TABLES[2].solver is SolverKind.GMRES

    def test_gmres_table_layout(self):
        """GMRES tables hold six methods at four grid sizes."""
        table = TABLES[2]
        assert table.grid_sizes == [16, 32, 48, 64]
        assert len(table.entries) == 24
        mgssp = [e for e in table.entries if e.kind is FamilyKind.MGSSP and e.p == 16]
        assert mgssp == [TableEntry(FamilyKind.MGSSP, 16, 0.6, 0.8, 7)]
        plain = [e for e in table.entries if e.kind is None and e.p == 64]
        assert plain[0].expected is None

    def test_stationary_parameters(self):
        """Tuned parameters are stored per method and size."""
        gss = [e for e in TABLES[5].entries if e.kind is FamilyKind.GSS and e.p == 16]
        assert gss == [TableEntry(FamilyKind.GSS, 16, 13, 39, 85)]
        mgssp = [e for e in TABLES[1].entries if e.kind is FamilyKind.MGSSP and e.p == 32]
        assert mgssp == [TableEntry(FamilyKind.MGSSP, 32, 0.5, 0.1, 21)]


class TestAcceptance:
    """Margins and pass/fail judgement."""

    @pytest.mark.parametrize("kind,solver,expected,margin", [
        (None, SolverKind.GMRES, 121, 13),
        (FamilyKind.MGSSP, SolverKind.GMRES, 7, 2),
        (FamilyKind.MSS, SolverKind.GMRES, 51, 6),
        (FamilyKind.MGSSP, SolverKind.STATIONARY, 21, 3),
        (FamilyKind.GSS, SolverKind.STATIONARY, 85, 9),
    ])
    def test_margins(self, kind, solver, expected, margin):
        """Short counts get absolute margins, long counts ten percent."""
        assert acceptance_margin(kind, solver, expected) == margin

    def test_compare(self):
        """Counts inside the margin pass, outside fail."""
        table = TABLES[2]
        entry = TableEntry(FamilyKind.MGSSP, 16, 0.6, 0.8, 7)
        assert compare(table, entry, _row(9)).passed
        assert not compare(table, entry, _row(10)).passed
        assert not compare(table, entry, _row(7, converged=False)).passed
        result = compare(table, entry, _row(8))
        assert (result.table, result.expected, result.observed, result.margin) == (2, 7, 8, 2)

    def test_compare_non_convergent_entry(self):
        """An entry without a count passes only when the run also stalls."""
        table = TABLES[2]
        entry = TableEntry(None, 64, 0.6, 0.8, None)
        assert compare(table, entry, _row(500, converged=False, method="GMRES")).passed
        assert not compare(table, entry, _row(480, method="GMRES")).passed


class TestTableRepro:
    """Argument handling of table_repro."""

    def test_unknown_table(self):
        """Only tables 1 to 8 exist."""
        with pytest.raises(UsageError):
            table_repro(9)

    def test_large_grids_need_extended(self):
        """Sizes above the cap are filtered out unless extended is set."""
        with pytest.raises(UsageError):
            table_repro(2, grids=[64], max_p=32)

    def test_missing_grid(self):
        """Grid sizes the table does not hold select nothing."""
        with pytest.raises(UsageError):
            table_repro(3, grids=[20])


@pytest.mark.slow
class TestReproduction:
    """Iteration counts of the reference tables at p = 16 (and 32 where cheap)."""

    @pytest.mark.parametrize("table_id", [2, 3])
    def test_gmres_tables(self, table_id):
        """Every preconditioned method of tables 2 and 3 matches its reference count."""
        rows = table_repro(table_id, grids=[16])
        assert len(rows) == 6
        preconditioned = [r for r in rows if r.method != "GMRES"]
        failures = [(r.method, r.expected, r.observed) for r in preconditioned if not r.passed]
        assert not failures
        assert all(r.res < 1e-6 for r in preconditioned)

    def test_unpreconditioned_gmres(self):
        """Plain GMRES on table 2 at p = 16 stays within ten percent of 121."""
        rows = {r.method: r for r in table_repro(2, grids=[16])}
        plain = rows["GMRES"]
        assert plain.passed
        assert plain.margin == 13
        assert abs(plain.observed - 121) <= 13

    def test_table4_spot_checks(self):
        """MGSSP and MSS at v = 0.01."""
        rows = {r.method: r for r in table_repro(4, grids=[16])}
        assert rows["MGSSP-GMRES"].passed
        assert rows["MSS-GMRES"].passed
        assert abs(rows["MSS-GMRES"].observed - 51) <= 5

    def test_table1_mesh_independence(self):
        """Stationary MGSSP needs about 21 steps on both grids."""
        rows = [r for r in table_repro(1, grids=[16, 32]) if r.method == "MGSSP"]
        assert [r.p for r in rows] == [16, 32]
        assert all(r.passed for r in rows)
        assert abs(rows[0].observed - rows[1].observed) <= 2

    def test_table5_singular_stationary(self):
        """MGSSP and GSS on the singular benchmark."""
        rows = {r.method: r for r in table_repro(5, grids=[16])}
        assert rows["MGSSP"].passed
        assert rows["GSS"].passed
        assert abs(rows["GSS"].observed - 85) <= 8
        assert rows["MGSSP"].res < 1e-6

    @pytest.mark.parametrize("table_id", [6, 7])
    def test_singular_gmres_spot_checks(self, table_id):
        """MGSSP-GMRES on the singular benchmark."""
        rows = {r.method: r for r in table_repro(table_id, grids=[16])}
        assert rows["MGSSP-GMRES"].passed
