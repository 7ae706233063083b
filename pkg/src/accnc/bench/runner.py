"""Run matrix execution, trace files and the summary table."""

from __future__ import annotations

import csv
import json
import math
import re
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from ..almost_convex import almost_convex_agd
from ..curvature import negative_curvature_descent
from ..driver import (RunReport, accelerated_nonconvex, choose_alpha, gradient_descent_baseline,
                      strict_saddle)
from ..problems import TestProblem, build_problem
from ..trace import Trace, TraceEntry
from .config import BenchConfig, SolverOptions
from .fit import fit_all
from .traces import TraceRow, write_trace

CERT_TOL = 1e-8


@dataclass
class RunOutcome:
    run_id: str
    problem: str
    solver: str
    eps: float
    seed: int
    success: bool
    grad_norm: float
    grad_calls: int
    hvp_calls: int
    wallclock: float
    min_hessian_eig: float = math.nan
    certified: Optional[bool] = None
    error: str = ""
    rows: list = field(default_factory=list, repr=False)


@dataclass
class SummaryRow:
    problem: str
    solver: str
    eps: float
    runs: int
    successes: int
    success_rate: float
    mean_calls: float
    median_calls: float
    mean_grad_calls: float
    mean_hvp_calls: float
    certified_rate: float
    mean_wallclock: float
    errors: str = ""


SUMMARY_COLUMNS = tuple(f.name for f in fields(SummaryRow))
WALLCLOCK_COLUMNS = ("mean_wallclock",)


@dataclass
class BenchResult:
    summary: list
    fits: dict
    outcomes: list
    out_dir: Path

    @property
    def failed(self) -> int:
        return sum(not o.success for o in self.outcomes)


def run_id(solver: str, problem: str, eps: float, seed: int) -> str:
    """Filesystem-safe identifier of one entry of the run matrix."""
    pid = re.sub(r"[^A-Za-z0-9.=-]+", "_", problem)
    return f"{solver}__{pid}__eps={eps:.3g}__seed={seed}"


def _ncd_only(prob: TestProblem, eps: float, delta: float, seed: int, opts: SolverOptions) -> RunReport:
    t0 = time.perf_counter()
    f, p = prob.oracle, prob.params
    trace = Trace(f)
    alpha = choose_alpha(eps, p.L1, p.L2, p.delta_f)
    res = negative_curvature_descent(
        f, prob.x0, p.L2, alpha, p.delta_f, delta, p.L1, rng=np.random.Generator(np.random.PCG64(seed)),
        backend=opts.eig_backend, C=opts.eig_constant, cap_factor=opts.outer_cap_factor, trace=trace)
    gnorm = float(np.linalg.norm(f.eval_grad(res.z)))
    trace.record("ncd", res.steps_taken + 1, f.eval_value(res.z), gnorm)
    c = trace.spent()
    return RunReport(solver="ncd-only", x=res.z, grad_norm=gnorm, success=res.certified,
                     phase_trace=list(trace.entries), grad_calls=c.grad, hvp_calls=c.hvp,
                     value_calls=c.value, wallclock=time.perf_counter() - t0, alpha=alpha)


def _acagd_only(prob: TestProblem, eps: float, opts: SolverOptions) -> RunReport:
    # every L1-smooth function is L1-almost convex
    t0 = time.perf_counter()
    f, p = prob.oracle, prob.params
    trace = Trace(f)
    res = almost_convex_agd(f, prob.x0, eps, p.L1, p.L1, inner_smoothness=opts.inner_smoothness,
                            delta_f=p.delta_f, cap_factor=opts.outer_cap_factor,
                            inner_cap_factor=opts.inner_cap_factor, trace=trace)
    c = trace.spent()
    return RunReport(solver="acagd-only", x=res.z, grad_norm=res.grad_norm, success=res.grad_norm <= eps,
                     phase_trace=list(trace.entries), grad_calls=c.grad, hvp_calls=c.hvp,
                     value_calls=c.value, wallclock=time.perf_counter() - t0,
                     outer_iterations=res.outer_iterations)


def solve(prob: TestProblem, solver: str, eps: float, delta: float, seed: int,
          opts: SolverOptions = SolverOptions()) -> RunReport:
    """Run one solver on a fresh copy of ``prob``."""
    prob = prob.fresh()
    cfg = opts.solver_config(eps, delta, seed)
    p = prob.params
    if solver == "accnc":
        return accelerated_nonconvex(prob.oracle, prob.x0, p, cfg)
    if solver == "gd":
        return gradient_descent_baseline(prob.oracle, prob.x0, eps, p.L1, delta_f=p.delta_f,
                                         cap_factor=opts.outer_cap_factor)
    if solver == "ncd-only":
        return _ncd_only(prob, eps, delta, seed, opts)
    if solver == "acagd-only":
        return _acagd_only(prob, eps, opts)
    if solver == "strict-saddle":
        return strict_saddle(prob.oracle, prob.x0, p, prob.sigma1, cfg)
    raise ValueError(f"unknown solver {solver!r}")


def _rows(rid, solver, problem, eps, seed, entries) -> list[TraceRow]:
    return [TraceRow(rid, solver, problem, eps, seed, e.phase, e.iteration, e.f, e.grad_norm,
                     e.grad_calls, e.hvp_calls)
            for e in entries or [] if isinstance(e, TraceEntry)]


def run_one(problem_id: str, solver: str, eps: float, seed: int, delta: float = 0.1,
            opts: SolverOptions = SolverOptions(), *, dense_check: bool = True) -> RunOutcome:
    """Run a single matrix entry; failures are captured, never raised."""
    rid = run_id(solver, problem_id, eps, seed)
    prob = build_problem(problem_id, seed)
    t0 = time.perf_counter()
    try:
        rep = solve(prob, solver, eps, delta, seed, opts)
    except Exception as exc:  # recorded in the summary, never aborts the batch
        entries = getattr(exc, "trace", None)
        rows = _rows(rid, solver, problem_id, eps, seed, entries)
        last = rows[-1] if rows else None
        return RunOutcome(rid, problem_id, solver, eps, seed, False, math.nan,
                          last.grad_calls if last else 0, last.hvp_calls if last else 0,
                          time.perf_counter() - t0, error=f"{type(exc).__name__}: {exc}", rows=rows)
    out = RunOutcome(rid, problem_id, solver, eps, seed, bool(rep.success), rep.grad_norm,
                     rep.grad_calls, rep.hvp_calls, rep.wallclock,
                     rows=_rows(rid, solver, problem_id, eps, seed, rep.phase_trace))
    if not out.success:
        out.error = "solver returned without meeting its stopping criterion"
    if dense_check:
        lam = float(np.linalg.eigvalsh(prob.dense_hessian(rep.x))[0])
        out.min_hessian_eig = lam
        out.certified = lam >= -2.0 * math.sqrt(eps * prob.params.L2) - CERT_TOL
    return out


def summarize(outcomes: list[RunOutcome]) -> list[SummaryRow]:
    groups: dict = {}
    for o in outcomes:
        groups.setdefault((o.problem, o.solver, o.eps), []).append(o)
    rows = []
    for (problem, solver, eps), runs in groups.items():
        ok = [o for o in runs if o.success]
        calls = np.array([o.grad_calls + o.hvp_calls for o in ok], dtype=float)
        certs = [o.certified for o in ok if o.certified is not None]

        def mean(a):
            return float(np.mean(a)) if len(a) else math.nan

        errors = sorted({o.error for o in runs if o.error})
        rows.append(SummaryRow(
            problem=problem, solver=solver, eps=eps, runs=len(runs), successes=len(ok),
            success_rate=len(ok) / len(runs), mean_calls=mean(calls),
            median_calls=float(np.median(calls)) if len(calls) else math.nan,
            mean_grad_calls=mean([o.grad_calls for o in ok]), mean_hvp_calls=mean([o.hvp_calls for o in ok]),
            certified_rate=mean([float(c) for c in certs]),
            mean_wallclock=mean([o.wallclock for o in runs]), errors=" | ".join(errors)))
    return rows


def write_summary(path, rows: list[SummaryRow], fits: dict, fmt: str = "csv") -> Path:
    path = Path(path)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SUMMARY_COLUMNS)
            for r in rows:
                w.writerow([repr(v) if isinstance(v, float) else v for v in asdict(r).values()])
        fit_path = path.with_name("fits.csv")
        with open(fit_path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("problem", "solver", "slope", "intercept", "r2", "n", "ci_low", "ci_high"))
            for (problem, solver), ft in sorted(fits.items()):
                w.writerow([problem, solver] + [repr(v) if isinstance(v, float) else v
                                                for v in asdict(ft).values()])
    else:
        doc = {
            "summary": [{k: (v if not isinstance(v, float) or math.isfinite(v) else repr(v))
                         for k, v in asdict(r).items()} for r in rows],
            "fits": [{"problem": p, "solver": s, **asdict(ft)} for (p, s), ft in sorted(fits.items())],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    return path


def read_summary(path) -> list[dict]:
    """Summary rows as dicts with numeric fields converted."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)["summary"]
    else:
        with open(path, encoding="utf-8", newline="") as fh:
            raw = list(csv.DictReader(fh))
    types = {f.name: f.type for f in fields(SummaryRow)}
    rows = []
    for rec in raw:
        row = {}
        for k, v in rec.items():
            t = types.get(k, "str")
            row[k] = float(v) if t == "float" else int(v) if t == "int" else v
        rows.append(row)
    return rows


def run_benchmark(cfg: BenchConfig, *, dense_check: bool = True, progress=None) -> BenchResult:
    """Execute the full run matrix in a fixed order and write all files.

    Configuration problems surface as :class:`ConfigError` before any run.
    """
    cfg.validate()
    out = Path(cfg.out)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    outcomes = []
    for problem in cfg.problems:
        for solver in cfg.solvers:
            for eps in cfg.eps:
                for seed in cfg.seeds:
                    o = run_one(problem, solver, eps, seed, cfg.delta, cfg.solver, dense_check=dense_check)
                    write_trace(out / "traces" / f"{o.run_id}.{cfg.format}", o.rows,
                                {"run_id": o.run_id, "solver": solver, "problem": problem,
                                 "eps": eps, "seed": seed}, cfg.format)
                    outcomes.append(o)
                    if progress is not None:
                        progress(o)
    summary = summarize(outcomes)
    fits = fit_all(summary)
    write_summary(out / f"summary.{cfg.format}", summary, fits, cfg.format)
    return BenchResult(summary=summary, fits=fits, outcomes=outcomes, out_dir=out)
