"""
Experiment runner: builds problems, runs solvers and writes CSV artifacts.

A single run produces one summary row and, on request, a residual history
and an eigenvalue list. Sweeps run the Cartesian product of parameter grids
on a thread pool and return rows in a fixed (kind, alpha, beta) order.
"""

from __future__ import annotations

import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from bench.models import EigenvalueRow, HistoryRow, RunSpec, SpectrumKind, SummaryRow
from bench.schemas import EigenvalueCSVSchema, HistoryCSVSchema, SummaryCSVSchema
from core.exceptions import NumericalFailureError, UsageError
from core.preconditioners import FamilyKind, ShiftSplitPreconditioner, build
from core.problems import SaddlePointSystem, build_example
from core.serialization.csv_format import CSVSchema
from core.solvers import IterationReport, solve
from core.spectral import dense_eigenvalues, iteration_matrix_of, preconditioned_matrix_of
from linalg.sparse_core import to_dense

logger = logging.getLogger(__name__)

DEFAULT_SPECTRAL_MAX_P = 8

_KIND_ORDER = {kind: index for index, kind in enumerate(FamilyKind)}


@lru_cache(maxsize=8)
def _system(example: int, p: int, v: float) -> SaddlePointSystem:
    return build_example(example, p, v)


def write_csv(schema: CSVSchema, rows: Sequence[object], target: Optional[Path] = None,
              stream: Optional[TextIO] = None) -> None:
    """Write rows to ``target`` (created with its parent directories) or to ``stream``."""
    if target is None:
        schema.dump_to_csv(list(rows), stream or sys.stdout)
        return
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="") as handle:
        schema.dump_to_csv(list(rows), handle)
    logger.info("Wrote %d rows to %s", len(rows), target)


def history_rows(report: IterationReport) -> List[HistoryRow]:
    return [HistoryRow(step=k, res=res) for k, res in enumerate(report.res_history)]


def eigenvalue_rows(values: np.ndarray) -> List[EigenvalueRow]:
    return [EigenvalueRow(re=float(z.real), im=float(z.imag)) for z in values]


def spectrum(spec: RunSpec, system: SaddlePointSystem,
             precond: Optional[ShiftSplitPreconditioner]) -> np.ndarray:
    """Eigenvalues requested by ``spec``: of the saddle matrix when unpreconditioned,
    otherwise of P^{-1} K or of the iteration matrix."""
    if precond is None:
        return dense_eigenvalues(to_dense(system.matrix()))
    if spec.spectrum is SpectrumKind.ITERATION:
        return dense_eigenvalues(iteration_matrix_of(precond))
    return dense_eigenvalues(preconditioned_matrix_of(precond))


def _execute(spec: RunSpec) -> Tuple[SummaryRow, IterationReport, SaddlePointSystem,
                                     Optional[ShiftSplitPreconditioner]]:
    system = _system(spec.example, spec.p, spec.v)
    precond = None
    if spec.kind is not None:
        precond = build(spec.kind, system, spec.shift_params())
    report = solve(system, precond, spec.solve_config(), spec.solver)
    return SummaryRow.from_report(spec, report), report, system, precond


def run(spec: RunSpec, *, spectral_max_p: int = DEFAULT_SPECTRAL_MAX_P,
        raise_on_failure: bool = True) -> SummaryRow:
    """Run one experiment and write the files it names.

    Args:
        spec: The experiment
        spectral_max_p: Largest p for which eigenvalues may be written
        raise_on_failure: Re-raise numerical failures after recording a
            diagnostic row; otherwise return the diagnostic row

    Returns:
        The summary row (iterations = -1 and res = nan for a failed run)

    Raises:
        UsageError: If eigenvalues are requested above ``spectral_max_p``
        NumericalFailureError: On solver failure when ``raise_on_failure`` is set

    Example:
        run(RunSpec(example=1, p=16, v=1, kind=FamilyKind.MGSSP, alpha=0.6, beta=0.8))
        # Returns a row with method 'MGSSP-GMRES' and about 7 iterations
    """
    if spec.eigs_path is not None and spec.p > spectral_max_p:
        raise UsageError(
            f"eigenvalue output is limited to p <= {spectral_max_p}, got p={spec.p}"
        )
    try:
        row, report, system, precond = _execute(spec)
    except NumericalFailureError as e:
        logger.error("%s failed for %s: %s", spec.method, _describe(spec), e)
        row = SummaryRow.diagnostic(spec)
        if spec.summary_path is not None:
            write_csv(SummaryCSVSchema(), [row], spec.summary_path)
        if raise_on_failure:
            raise
        return row

    if row.converged:
        logger.info("%s %s: IT=%d RES=%.2e", spec.method, _describe(spec), row.iterations, row.res)
    else:
        logger.warning(
            "%s %s did not converge in %d steps (RES=%.2e)",
            spec.method, _describe(spec), row.iterations, row.res,
        )

    if spec.summary_path is not None:
        write_csv(SummaryCSVSchema(), [row], spec.summary_path)
    if spec.history_path is not None:
        write_csv(HistoryCSVSchema(), history_rows(report), spec.history_path)
    if spec.eigs_path is not None:
        write_csv(EigenvalueCSVSchema(), eigenvalue_rows(spectrum(spec, system, precond)),
                  spec.eigs_path)
    return row


def _describe(spec: RunSpec) -> str:
    text = f"example={spec.example} p={spec.p} v={spec.v:g}"
    if spec.kind is not None:
        text += f" alpha={spec.alpha:g} beta={spec.effective_beta:g}"
    return text


def _order_key(spec: RunSpec) -> Tuple[int, float, float]:
    kind_rank = -1 if spec.kind is None else _KIND_ORDER[spec.kind]
    beta = spec.effective_beta
    return kind_rank, spec.alpha if spec.kind is not None else 0.0, beta if beta is not None else 0.0


def run_many(specs: Iterable[RunSpec], workers: int = 1,
             spectral_max_p: int = DEFAULT_SPECTRAL_MAX_P) -> List[SummaryRow]:
    """Run independent experiments, possibly in parallel, preserving input order."""
    specs = list(specs)

    def task(spec: RunSpec) -> SummaryRow:
        return run(spec, spectral_max_p=spectral_max_p, raise_on_failure=False)

    if workers <= 1 or len(specs) <= 1:
        return [task(spec) for spec in specs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, specs))


def sweep(
    base: RunSpec,
    alphas: Sequence[float],
    betas: Sequence[float],
    kinds: Sequence[Optional[FamilyKind]],
    *,
    beta_equals_alpha: bool = False,
    workers: int = 1,
) -> List[SummaryRow]:
    """Run every (kind, alpha, beta) combination on the problem of ``base``.

    Tied kinds, and every kind when ``beta_equals_alpha`` is set, run once
    per alpha with beta = alpha. ``None`` in ``kinds`` adds one
    unpreconditioned run. Failed runs appear as diagnostic rows. Points
    that violate a parameter rule (alpha = 0 for a tied kind) are skipped
    with a warning.

    Args:
        base: Problem, solver and stopping rule shared by all runs; its
            summary path receives the combined CSV
        alphas: Alpha grid
        betas: Beta grid (unused when beta_equals_alpha is set)
        kinds: Family members to run
        beta_equals_alpha: Tie beta to alpha for every kind
        workers: Thread-pool size

    Returns:
        Summary rows sorted by (kind, alpha, beta)

    Raises:
        UsageError: If a grid or the kind list is empty
    """
    if not kinds:
        raise UsageError("sweep needs at least one preconditioner kind")
    if not alphas or (not betas and not beta_equals_alpha):
        raise UsageError("sweep needs non-empty alpha and beta grids")

    specs: List[RunSpec] = []
    for kind in dict.fromkeys(kinds):
        if kind is None:
            specs.append(_point(base, None, base.alpha, base.beta))
            continue
        for alpha in alphas:
            grid = [alpha] if beta_equals_alpha or kind.descriptor.tied else betas
            for beta in grid:
                try:
                    specs.append(_point(base, kind, alpha, beta))
                except UsageError as e:
                    logger.warning("Skipping %s alpha=%g beta=%g: %s", kind.label, alpha, beta, e)

    specs.sort(key=_order_key)
    logger.info("Sweeping %d runs on %d worker(s)", len(specs), workers)
    rows = run_many(specs, workers)
    if base.summary_path is not None:
        write_csv(SummaryCSVSchema(), rows, base.summary_path)
    return rows


def _point(base: RunSpec, kind: Optional[FamilyKind], alpha: float, beta: Optional[float]) -> RunSpec:
    return replace(
        base,
        kind=kind,
        alpha=alpha,
        beta=beta,
        summary_path=None,
        history_path=None,
        eigs_path=None,
    )
