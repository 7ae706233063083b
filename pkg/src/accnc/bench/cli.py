"""``bench`` command line: run sweeps, fit exponents, run the invariant battery.

Exit codes: 0 success, 1 at least one failed run or check, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from ..errors import ConfigError
from .config import FORMATS, SOLVERS, load_config
from .fit import fit_scaling
from .runner import read_summary, run_benchmark

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bench", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="execute a benchmark sweep")
    run.add_argument("--config", help="INI-style config file")
    run.add_argument("--problems", nargs="+", help="problem ids, e.g. doublewell:d=20")
    run.add_argument("--solvers", nargs="+", help=f"subset of {', '.join(SOLVERS)}")
    run.add_argument("--eps", nargs="+", help="accuracy sweep")
    run.add_argument("--seeds", nargs="+", help="seeds (distinct integers)")
    run.add_argument("--delta", type=float, help="failure probability")
    run.add_argument("--out", help="output directory")
    run.add_argument("--format", choices=FORMATS)
    run.add_argument("--no-dense-check", action="store_true",
                     help="skip the dense Hessian check of the returned points")
    run.add_argument("-q", "--quiet", action="store_true")

    fit = sub.add_parser("fit", help="fit log(calls) against log(1/eps) from a summary file")
    fit.add_argument("--summary", required=True)
    fit.add_argument("--value", default="median_calls", choices=("median_calls", "mean_calls"))

    ver = sub.add_parser("verify", help="run the invariant battery")
    ver.add_argument("--seed", type=int, default=0)
    return ap


def _flatten(values):
    if values is None:
        return None
    return [v for item in values for v in _list(item)]


def _cmd_run(args) -> int:
    try:
        eps = _flatten(args.eps)
        seeds = _flatten(args.seeds)
        cfg = load_config(
            args.config, problems=_flatten(args.problems), solvers=_flatten(args.solvers),
            eps=[float(e) for e in eps] if eps else None,
            seeds=[int(s) for s in seeds] if seeds else None,
            delta=args.delta, out=args.out, format=args.format)
        progress = None
        if not args.quiet:
            def progress(o):
                status = "ok  " if o.success else "FAIL"
                print(f"{status} {o.run_id}  calls={o.grad_calls + o.hvp_calls}"
                      + (f"  {o.error}" if o.error else ""), flush=True)
        res = run_benchmark(cfg, dense_check=not args.no_dense_check, progress=progress)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for (problem, solver), ft in sorted(res.fits.items()):
        print(f"slope {solver:>13} on {problem}: {ft.slope:.3f}  (R^2={ft.r2:.3f})")
    print(f"{len(res.outcomes)} runs, {res.failed} failed; summary in {res.out_dir}")
    return EXIT_FAILED if res.failed else EXIT_OK


def _cmd_fit(args) -> int:
    try:
        rows = read_summary(args.summary)
    except (OSError, KeyError, ValueError) as exc:
        print(f"config error: cannot read summary {args.summary}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    groups: dict = {}
    for r in rows:
        groups.setdefault((r["problem"], r["solver"]), []).append(r)
    status = EXIT_OK
    for (problem, solver), grp in sorted(groups.items()):
        try:
            ft = fit_scaling(grp, value=args.value)
        except ConfigError as exc:
            print(f"{solver} on {problem}: {exc}", file=sys.stderr)
            status = EXIT_CONFIG
            continue
        print(f"{solver} on {problem}: slope={ft.slope:.4f} [{ft.ci_low:.4f}, {ft.ci_high:.4f}] "
              f"intercept={ft.intercept:.4f} R^2={ft.r2:.4f} n={ft.n}")
    return status


def _cmd_verify(args) -> int:
    from .verify import run_checks

    results = run_checks(args.seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.cmd == "run":
        return _cmd_run(args)
    if args.cmd == "fit":
        return _cmd_fit(args)
    return _cmd_verify(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
