"""Run specifications and result rows for the benchmark harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, unique
from pathlib import Path
from typing import Optional

from core.exceptions import InvalidParameterError, UsageError
from core.preconditioners import FamilyKind, ShiftParams
from core.solvers import IterationReport, SolveConfig, SolverKind


@unique
class SpectrumKind(str, Enum):
    """Which operator's eigenvalues an ``--eigs`` file receives."""

    PRECONDITIONED = "preconditioned"
    ITERATION = "iteration"


def method_label(kind: Optional[FamilyKind], solver: SolverKind) -> str:
    """Method name used in result tables.

    Examples:
        method_label(FamilyKind.MGSSP, SolverKind.STATIONARY)  # 'MGSSP'
        method_label(FamilyKind.MGSSP, SolverKind.GMRES)       # 'MGSSP-GMRES'
        method_label(None, SolverKind.GMRES)                   # 'GMRES'
    """
    if kind is None:
        return "GMRES" if solver is SolverKind.GMRES else "STATIONARY"
    if solver is SolverKind.STATIONARY:
        return kind.label
    return f"{kind.label}-GMRES"


@dataclass(frozen=True)
class RunSpec:
    """One experiment: problem, method, parameters and optional output files.

    Raises:
        UsageError: If the combination is inconsistent (odd p for example 2,
            stationary run without a preconditioner, beta <= 0 for a free kind, ...)
    """

    example: int
    p: int
    v: float
    kind: Optional[FamilyKind] = FamilyKind.MGSSP
    solver: SolverKind = SolverKind.GMRES
    alpha: float = 1.0
    beta: Optional[float] = 1.0
    tolerance: float = 1e-6
    max_iterations: int = 500
    summary_path: Optional[Path] = field(default=None, compare=False)
    history_path: Optional[Path] = field(default=None, compare=False)
    eigs_path: Optional[Path] = field(default=None, compare=False)
    spectrum: SpectrumKind = SpectrumKind.PRECONDITIONED

    def __post_init__(self) -> None:
        if self.example not in (1, 2):
            raise UsageError(f"example must be 1 or 2, got {self.example}")
        if self.p < 2:
            raise UsageError(f"p must be >= 2, got {self.p}")
        if self.example == 2 and self.p % 2:
            raise UsageError(f"example 2 needs an even p, got {self.p}")
        if not self.v > 0:
            raise UsageError(f"v must be > 0, got {self.v}")
        if not self.tolerance > 0:
            raise UsageError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise UsageError(f"max iterations must be >= 1, got {self.max_iterations}")
        if self.kind is None:
            if self.solver is SolverKind.STATIONARY:
                raise UsageError("the stationary solver needs a preconditioner (--precond)")
            return
        try:
            self.shift_params()
        except InvalidParameterError as e:
            raise UsageError(str(e)) from e

    @property
    def method(self) -> str:
        return method_label(self.kind, self.solver)

    @property
    def effective_beta(self) -> Optional[float]:
        """Beta actually used: alpha for tied kinds, None without a preconditioner."""
        if self.kind is None:
            return None
        if self.kind.descriptor.tied:
            return self.alpha
        return self.beta

    def shift_params(self) -> ShiftParams:
        if self.kind is None:
            raise UsageError("no preconditioner selected")
        return ShiftParams.for_kind(self.kind, self.alpha, self.beta)

    def solve_config(self) -> SolveConfig:
        return SolveConfig(tolerance=self.tolerance, max_iterations=self.max_iterations)


def _round_res(value: float) -> float:
    return value if math.isnan(value) else float(f"{value:.2e}")


@dataclass(frozen=True)
class SummaryRow:
    """One line of the summary CSV.

    ``res`` keeps three significant digits and ``time_ms`` three decimals,
    which is the precision the CSV stores.
    """

    method: str
    example: int
    p: int
    v: float
    alpha: Optional[float]
    beta: Optional[float]
    iterations: int
    res: float
    converged: bool
    time_ms: float

    def __post_init__(self) -> None:
        object.__setattr__(self, 'res', _round_res(float(self.res)))
        object.__setattr__(self, 'time_ms', round(float(self.time_ms), 3))

    @classmethod
    def from_report(cls, spec: RunSpec, report: IterationReport) -> SummaryRow:
        return cls(
            method=spec.method,
            example=spec.example,
            p=spec.p,
            v=spec.v,
            alpha=spec.alpha if spec.kind is not None else None,
            beta=spec.effective_beta,
            iterations=report.iterations,
            res=report.final_res,
            converged=report.converged,
            time_ms=report.wall_time_ms,
        )

    @classmethod
    def diagnostic(cls, spec: RunSpec) -> SummaryRow:
        """Row recorded for a run that failed with a numerical error."""
        return cls(
            method=spec.method,
            example=spec.example,
            p=spec.p,
            v=spec.v,
            alpha=spec.alpha if spec.kind is not None else None,
            beta=spec.effective_beta,
            iterations=-1,
            res=math.nan,
            converged=False,
            time_ms=0.0,
        )

    @property
    def failed(self) -> bool:
        return self.iterations < 0


@dataclass(frozen=True)
class HistoryRow:
    step: int
    res: float


@dataclass(frozen=True)
class EigenvalueRow:
    re: float
    im: float


@dataclass(frozen=True)
class ComparisonRow:
    """Expected versus observed iteration count for one table entry.

    ``expected`` is None for entries where the reference run did not
    converge within the step cap; such entries pass only if the observed
    run does not converge either.
    """

    table: int
    method: str
    p: int
    v: float
    alpha: Optional[float]
    beta: Optional[float]
    expected: Optional[int]
    observed: int
    margin: int
    res: float
    passed: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, 'res', _round_res(float(self.res)))
