"""Command-line interface of the benchmark harness.

Three modes share one parser:

- a single run (default),
- a sweep, selected by ``--sweep-alpha`` or by several ``--precond`` kinds,
- a table reproduction, selected by ``--table``.

CSV results go to ``--out`` or, without it, to stdout. Relative output
paths are placed under the RESULTS_DIR setting. Exit status is 0 on
success (including runs that stop without converging), 1 on a usage error
and 2 on a numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from marshmallow import ValidationError

from bench.models import RunSpec, SpectrumKind
from bench.runner import run, sweep, write_csv
from bench.schemas import ComparisonCSVSchema, RunSpecSchema, SummaryCSVSchema
from bench.tables import TABLES, table_repro
from core.config import load_config
from core.exceptions import NumericalFailureError, ResourceLimitError, UsageError
from core.preconditioners import FamilyKind
from core.solvers import SolverKind

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting on bad input."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser(config: Dict[str, Any]) -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mgssp-bench",
        description="Shift-splitting preconditioners for saddle-point systems",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--example", type=int, choices=[1, 2], default=1, help="Benchmark problem")
    parser.add_argument("--p", type=int, default=None, help="Grid points per direction (16 for a single run)")
    parser.add_argument("--v", type=float, default=1.0, help="Viscosity")
    parser.add_argument("--solver", choices=[s.value for s in SolverKind], default=SolverKind.GMRES.value)
    parser.add_argument("--precond", default=FamilyKind.MGSSP.value,
                        help="none or a comma list of: " + ",".join(k.value for k in FamilyKind))
    parser.add_argument("--alpha", type=float, default=1.0, help="Shift on the (1,1) block")
    parser.add_argument("--beta", type=float, default=None, help="Shift on the (2,2) block")
    parser.add_argument("--tol", type=float, default=config["DEFAULT_TOLERANCE"], help="Stopping tolerance on RES")
    parser.add_argument("--maxit", type=int, default=config["DEFAULT_MAX_ITERATIONS"], help="Iteration cap")
    parser.add_argument("--out", type=Path, default=None,
                        help="Summary CSV (stdout when omitted)")
    parser.add_argument("--history", type=Path, default=None, help="Residual-history CSV")
    parser.add_argument("--eigs", type=Path, default=None, help="Eigenvalue CSV")
    parser.add_argument("--spectrum", choices=[s.value for s in SpectrumKind],
                        default=SpectrumKind.PRECONDITIONED.value,
                        help="Operator whose eigenvalues --eigs writes")
    parser.add_argument("--table", type=int, choices=sorted(TABLES), default=None,
                        help="Reproduce a reference table")
    parser.add_argument("--extended", action="store_true", default=False,
                        help="Allow table grid sizes above TABLE_MAX_P")
    parser.add_argument("--sweep-alpha", default=None, metavar="LO:HI:STEP", help="Alpha grid")
    parser.add_argument("--sweep-beta", default=None, metavar="LO:HI:STEP", help="Beta grid")
    parser.add_argument("--beta-equals-alpha", action="store_true", default=False,
                        help="Tie beta to alpha in sweeps")
    parser.add_argument("--workers", type=int, default=config["SWEEP_WORKERS"], help="Sweep thread-pool size")
    return parser


def parse_range(text: str) -> List[float]:
    """Expand ``LO:HI:STEP`` into an inclusive grid.

    Example:
        parse_range("0.1:0.5:0.1")
        # Returns: [0.1, 0.2, 0.3, 0.4, 0.5]
    """
    try:
        lo, hi, step = (float(part) for part in text.split(":"))
    except ValueError as e:
        raise UsageError(f"expected LO:HI:STEP, got {text!r}") from e
    if not (math.isfinite(lo) and math.isfinite(hi) and step > 0 and hi >= lo):
        raise UsageError(f"need finite LO <= HI and STEP > 0, got {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def parse_kinds(text: str) -> List[Optional[FamilyKind]]:
    kinds: List[Optional[FamilyKind]] = []
    for token in (t.strip().lower() for t in text.split(",")):
        if token == "none":
            kinds.append(None)
            continue
        try:
            kinds.append(FamilyKind(token))
        except ValueError as e:
            raise UsageError(f"unknown preconditioner {token!r}") from e
    if not kinds:
        raise UsageError("no preconditioner given")
    return kinds


def _resolve_outputs(args: argparse.Namespace, results_dir: Path) -> None:
    """Place relative output paths under the results directory."""
    for name in ("out", "history", "eigs"):
        path = getattr(args, name)
        if path is not None and not path.is_absolute():
            setattr(args, name, results_dir / path)


def _load_spec(args: argparse.Namespace, kind: Optional[FamilyKind]) -> RunSpec:
    data = {
        "example": args.example,
        "p": args.p if args.p is not None else 16,
        "v": args.v,
        "kind": kind.value if kind is not None else None,
        "solver": args.solver,
        "alpha": args.alpha,
        "beta": args.beta,
        "tolerance": args.tol,
        "max_iterations": args.maxit,
        "summary_path": str(args.out) if args.out else None,
        "history_path": str(args.history) if args.history else None,
        "eigs_path": str(args.eigs) if args.eigs else None,
        "spectrum": args.spectrum,
    }
    try:
        return RunSpecSchema().load(data)
    except ValidationError as e:
        raise UsageError(f"invalid run specification: {e.messages}") from e


def _run_table(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    rows = table_repro(
        args.table,
        grids=[args.p] if args.p is not None else None,
        extended=args.extended,
        max_p=config["TABLE_MAX_P"],
        tolerance=args.tol,
        max_iterations=args.maxit,
        workers=args.workers,
    )
    write_csv(ComparisonCSVSchema(), rows, args.out)
    return EXIT_OK


def _run_sweep(args: argparse.Namespace, kinds: List[Optional[FamilyKind]]) -> int:
    if args.history or args.eigs:
        raise UsageError("--history and --eigs apply to single runs only")
    alphas = parse_range(args.sweep_alpha) if args.sweep_alpha else [args.alpha]
    if args.sweep_beta:
        betas = parse_range(args.sweep_beta)
    else:
        betas = [args.beta] if args.beta is not None else []
    base = RunSpec(
        example=args.example,
        p=args.p if args.p is not None else 16,
        v=args.v,
        kind=None if args.solver == SolverKind.GMRES.value else FamilyKind.MGSSP,
        solver=SolverKind(args.solver),
        tolerance=args.tol,
        max_iterations=args.maxit,
        summary_path=args.out,
    )
    rows = sweep(base, alphas, betas, kinds,
                 beta_equals_alpha=args.beta_equals_alpha, workers=args.workers)
    if args.out is None:
        write_csv(SummaryCSVSchema(), rows)
    return EXIT_OK


def _run_single(args: argparse.Namespace, kind: Optional[FamilyKind], config: Dict[str, Any]) -> int:
    spec = _load_spec(args, kind)
    row = run(spec, spectral_max_p=config["SPECTRAL_MAX_P"], raise_on_failure=False)
    if spec.summary_path is None:
        write_csv(SummaryCSVSchema(), [row])
    return EXIT_NUMERICAL if row.failed else EXIT_OK


def main(argv: Optional[Sequence[str]] = None, config: Optional[Dict[str, Any]] = None) -> int:
    """Parse arguments, dispatch to a mode and map errors to exit codes.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]
        config: Configuration dictionary; defaults to load_config()

    Returns:
        Process exit status
    """
    config = config or load_config()
    try:
        args = build_parser(config).parse_args(list(sys.argv[1:] if argv is None else argv))
        _resolve_outputs(args, Path(config["RESULTS_DIR"]))
        if args.table is not None:
            return _run_table(args, config)
        kinds = parse_kinds(args.precond)
        if args.sweep_alpha or args.sweep_beta or len(kinds) > 1:
            return _run_sweep(args, kinds)
        return _run_single(args, kinds[0], config)
    except (ValueError, ResourceLimitError) as e:
        logger.error("Usage error: %s", e)
        return EXIT_USAGE
    except NumericalFailureError as e:
        logger.error("Numerical failure: %s", e)
        return EXIT_NUMERICAL
