"""Benchmark harness: sweeps, trace files, scaling fits and the invariant battery."""

from .config import SOLVERS, BenchConfig, SolverOptions, load_config, write_config
from .fit import ScalingFit, fit_all, fit_scaling
from .runner import (BenchResult, RunOutcome, SummaryRow, read_summary, run_benchmark, run_id,
                     run_one, solve, summarize, write_summary)
from .traces import COLUMNS, TraceRow, read_trace, write_trace

__all__ = [
    "SOLVERS", "BenchConfig", "SolverOptions", "load_config", "write_config",
    "ScalingFit", "fit_all", "fit_scaling",
    "BenchResult", "RunOutcome", "SummaryRow", "read_summary", "run_benchmark", "run_id",
    "run_one", "solve", "summarize", "write_summary",
    "COLUMNS", "TraceRow", "read_trace", "write_trace",
]
