"""Benchmark harness: run specifications, CSV artifacts, sweeps and table reproduction."""

from bench.models import RunSpec, SummaryRow
from bench.runner import run, sweep
from bench.tables import table_repro

__all__ = [
    'RunSpec',
    'SummaryRow',
    'run',
    'sweep',
    'table_repro',
]
