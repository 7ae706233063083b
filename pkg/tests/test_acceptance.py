"""Executable acceptance battery: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they are
produced; they are also repeated in the terminal summary.
"""

import math

import numpy as np
import pytest
from scipy.stats import linregress

from accnc import (QuadraticOracle, SolverConfig, accelerated_gradient_descent, accelerated_nonconvex,
                   almost_convex_agd, build_problem, make_test_suite, min_eigvec_lanczos,
                   min_eigvec_power, rho_alpha, strict_saddle)
from accnc.agd import agd_iteration_bound
from accnc.almost_convex import outer_iteration_bound as acagd_outer_bound
from accnc.bench import SOLVERS, BenchConfig, run_benchmark, run_one, write_trace
from accnc.curvature import step_bound
from accnc.oracle import FunctionOracle, hinge_penalty_hvp

RESULTS: dict[int, str] = {}

EPS_GRID = (1e-2, 1e-3, 1e-4)


def record(num: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    RESULTS[num] = line
    print(line)


def bounded_suite():
    # the unbounded quadratic has no finite optimality gap, so no stationarity
    # contract can hold on it; it is kept in the suite for curvature tests only
    return [p for p in make_test_suite(0) if "unbounded" not in p.tags]


@pytest.fixture(scope="module")
def suite_runs():
    runs = []
    for prob in bounded_suite():
        for eps in EPS_GRID:
            p = prob.fresh()
            rep = accelerated_nonconvex(p.oracle, p.x0, p.params, SolverConfig(eps=eps, seed=0))
            runs.append((p, eps, rep))
    return runs


def test_criterion_1_stationarity(suite_runs):
    bad = [(p.name, eps, rep.grad_norm, round(rep.wallclock, 2)) for p, eps, rep in suite_runs
           if not (rep.success and rep.grad_norm <= eps and rep.wallclock < 60.0)]
    slowest = max(rep.wallclock for _, _, rep in suite_runs)
    record(1, not bad, f"{len(suite_runs)} runs (4 bounded problems x eps {EPS_GRID}), "
                       f"violations={bad}, slowest run {slowest:.1f}s")
    assert not bad


SECOND_ORDER_IDS = ("quadratic:d=20:kappa=100", "doublewell:d=20", "rosenbrock:d=2", "random:d=50")


def test_criterion_2_second_order_certificate():
    eps, delta, n = 1e-3, 0.1, 50
    rates, saddle_hits, details = {}, 0, []
    for pid in SECOND_ORDER_IDS:
        outs = [run_one(pid, "accnc", eps, seed, delta=delta) for seed in range(n)]
        rates[pid] = sum(o.success and o.certified for o in outs) / n
        if pid.startswith("doublewell"):
            saddle_hits = sum(not (o.min_hessian_eig is not None and o.min_hessian_eig > 0) for o in outs)
        details.append(f"{pid}={rates[pid]:.2f}")
    ok = all(r >= 1 - delta for r in rates.values()) and saddle_hits == 0
    record(2, ok, f"certified fraction over {n} seeds: {', '.join(details)}; "
                  f"double-well runs ending at a point with lambda_min <= 0: {saddle_hits}")
    assert ok


def test_criterion_3_ncd_progress(suite_runs):
    steps = 0
    violations = []
    for p, eps, rep in suite_runs:
        L2, alpha = p.params.L2, rep.alpha
        need = alpha**3 / (12 * L2**2)
        total = 0
        for rec in rep.outer:
            if rec.ncd is None:
                continue
            total += rec.ncd.steps_taken
            for s in rec.ncd.steps:
                steps += 1
                dec = s.f_before - s.f_after
                if dec < need - 1e-10:
                    violations.append((p.name, eps, dec, need))
        if total > 1 + step_bound(L2, p.params.delta_f, alpha):
            violations.append((p.name, eps, "total", total))
    # an extra escape-heavy batch: the double well started at its saddle
    for seed in range(20):
        p = build_problem("doublewell:d=20", seed)
        rep = accelerated_nonconvex(p.oracle, p.x0, p.params, SolverConfig(eps=1e-4, seed=seed))
        need = rep.alpha**3 / (12 * p.params.L2**2)
        total = sum(r.ncd.steps_taken for r in rep.outer if r.ncd is not None)
        for rec in rep.outer:
            for s in (rec.ncd.steps if rec.ncd else []):
                steps += 1
                if s.f_before - s.f_after < need - 1e-10:
                    violations.append((p.name, seed, s.f_before - s.f_after, need))
        if total > 1 + step_bound(p.params.L2, p.params.delta_f, rep.alpha):
            violations.append((p.name, seed, "total", total))
    ok = steps > 0 and not violations
    record(3, ok, f"{steps} accepted NCD steps checked, violations={violations[:3]}")
    assert ok


def cosine_bowl():
    return FunctionOracle(
        2, lambda x: x[0] ** 2 + 0.5 * math.cos(x[1]),
        lambda x: np.array([2.0 * x[0], -0.5 * math.sin(x[1])]),
        hvp=lambda x, v: np.array([2.0 * v[0], -0.5 * math.cos(x[1]) * v[1]]))


def test_criterion_4_acagd_bound(suite_runs):
    checked, steps, violations = 0, 0, []

    def check(name, res, eps, gamma, delta_f):
        nonlocal checked, steps
        checked += 1
        if res.outer_iterations > acagd_outer_bound(eps, gamma, delta_f):
            violations.append((name, res.outer_iterations, acagd_outer_bound(eps, gamma, delta_f)))
        for s in res.steps:
            steps += 1
            if s.f_after > s.f_before - gamma * s.displacement**2 + 1e-10:
                violations.append((name, "descent", s.f_before, s.f_after))

    # direct calls on globally almost-convex functions
    for eps in EPS_GRID:
        f, z1 = cosine_bowl(), np.array([1.0, 1.0])
        check("cosine-bowl", almost_convex_agd(f, z1, eps, 0.5, 2.0), eps, 0.5, f.eval_value(z1) + 0.5)
        q = build_problem("quadratic:d=20:kappa=100")
        gamma = q.params.L1 / 2
        check(q.name, almost_convex_agd(q.oracle, q.x0, eps, gamma, q.params.L1), eps, gamma, q.params.delta_f)
    # the penalized models solved inside the accelerated method: gamma = 3 alpha at accuracy eps/2
    for p, eps, rep in suite_runs:
        for rec in rep.outer:
            if rec.acagd is not None:
                check(p.name, rec.acagd, eps / 2, 3 * rep.alpha, p.delta_f_at(rec.x_hat))
    ok = checked > 0 and steps > 0 and not violations
    record(4, ok, f"{checked} ACAGD calls, {steps} outer steps checked, violations={violations[:3]}")
    assert ok


def test_criterion_5_agd_bound_and_decay():
    eps = 1e-6
    details, violations = [], []
    for kappa in (10, 100, 1000):
        p = build_problem(f"quadratic:d=20:kappa={kappa}")
        A, y1 = p.meta["A"], p.x0
        L1, sigma = p.params.L1, p.meta["mu"]
        gap = lambda y: 0.5 * y @ A @ y  # minimum 0 at the origin
        ys = []
        res = accelerated_gradient_descent(p.oracle, y1, eps, L1, sigma, delta_g=gap(y1),
                                           callback=lambda j, y: ys.append(y.copy()))
        bound = 1 + math.sqrt(kappa) * math.log(4 * L1**2 * gap(y1) / (sigma * eps**2))
        assert bound == pytest.approx(agd_iteration_bound(L1, sigma, eps, gap(y1)))
        if res.iterations > bound:
            violations.append((kappa, res.iterations, bound))
        # potential-function envelope, checked at the end of every 10-iteration window
        q = 1 - math.sqrt(1 / kappa)
        env0 = gap(y1) + 0.5 * sigma * y1 @ y1
        for j in range(11, len(ys) + 1, 10):
            if gap(ys[j - 1]) > 1.1 * env0 * q ** (j - 1):
                violations.append((kappa, j, gap(ys[j - 1]), env0 * q ** (j - 1)))
        details.append(f"kappa={kappa}: {res.iterations} <= {bound:.0f}")
    ok = not violations
    record(5, ok, f"{'; '.join(details)}; decay violations={violations[:3]}")
    assert ok


def test_criterion_6_eigen_accuracy():
    n, d, delta = 200, 20, 0.1
    misses, cost_losses, lanczos_cost, power_cost = 0, 0, 0, 0
    for seed in range(n):
        rng = np.random.Generator(np.random.PCG64(seed))
        Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        A = (Q * rng.uniform(-1.0, 1.0, d)) @ Q.T
        A = 0.5 * (A + A.T)
        lam = np.linalg.eigvalsh(A)
        L1 = float(np.max(np.abs(lam)))
        eps_add = 0.01 * L1
        x = np.zeros(d)
        lz = min_eigvec_lanczos(QuadraticOracle(A), x, eps_add, delta, L1, rng=seed)
        pw = min_eigvec_power(QuadraticOracle(A), x, eps_add, delta, L1, rng=seed)
        misses += lz.rayleigh - lam[0] > eps_add
        cost_losses += not lz.hvp_cost < pw.hvp_cost
        lanczos_cost += lz.hvp_cost
        power_cost += pw.hvp_cost
    ok = misses <= delta * n and cost_losses == 0
    record(6, ok, f"Lanczos misses {misses}/{n} (allowed {delta * n:.0f}); instances where Lanczos "
                  f"was not cheaper: {cost_losses}; mean HVPs Lanczos {lanczos_cost / n:.1f} "
                  f"vs power {power_cost / n:.1f}")
    assert ok


def test_criterion_7_scaling_exponent(tmp_path):
    cfg = BenchConfig(problems=("random:d=50",), eps=(1e-2, 3e-3, 1e-3, 3e-4, 1e-4),
                      solvers=("accnc", "gd"), seeds=(0, 1, 2, 3, 4), out=str(tmp_path / "scaling"))
    res = run_benchmark(cfg, dense_check=False)
    acc = res.fits[("random:d=50", "accnc")]
    gd = res.fits[("random:d=50", "gd")]
    ok = res.failed == 0 and acc.slope <= 1.9 and gd.slope >= 1.8 and acc.slope < gd.slope
    record(7, ok, f"slope accnc {acc.slope:.3f} [{acc.ci_low:.2f}, {acc.ci_high:.2f}] r2={acc.r2:.3f}; "
                  f"GD {gd.slope:.3f} [{gd.ci_low:.2f}, {gd.ci_high:.2f}] r2={gd.r2:.3f}; "
                  f"failed runs {res.failed}")
    assert ok


def test_criterion_8_strict_saddle():
    # phase-two cost grows in plateaus (momentum oscillation around a single
    # curvature mode), so the sweep spans nine decades to expose the linear trend
    eps_list = [10.0 ** -k for k in np.arange(3.0, 12.01, 0.5)]
    violations, calls = [], []
    for eps in eps_list:
        per_seed = []
        for seed in range(3):
            p = build_problem("doublewell:d=10", seed)
            rep = strict_saddle(p.oracle, p.x0, p.params, p.sigma1, SolverConfig(eps=eps, seed=seed))
            xs = p.nearest_minimizer(rep.x)
            dist = float(np.linalg.norm(rep.x - xs))
            gap = p.oracle._value(rep.x) - p.oracle._value(xs)
            if not (rep.success and dist <= 2 * eps / p.sigma1
                    and gap <= 2 * p.params.L1 * eps**2 / p.sigma1**2):
                violations.append((eps, seed, dist, gap))
            per_seed.append(rep.phase2_calls)
        calls.append(float(np.median(per_seed)))
    fit = linregress(np.log(1 / np.array(eps_list)), calls)
    r2 = fit.rvalue**2
    ok = not violations and r2 >= 0.9 and fit.slope > 0
    record(8, ok, f"{len(eps_list)} eps values x 3 seeds, guarantee violations={violations[:3]}; "
                  f"phase-2 calls ~ {fit.intercept:.1f} + {fit.slope:.2f} log(1/eps), R2={r2:.3f}")
    assert ok


def test_criterion_9_penalty():
    rng = np.random.Generator(np.random.PCG64(2024))
    d = 6
    convex_bad = grad_bad = hess_bad = hess_checked = 0
    for _ in range(1000):
        alpha, L1, L2 = rng.uniform(0.05, 2.0), rng.uniform(0.5, 5.0), rng.uniform(0.5, 5.0)
        r = alpha / L2
        x, y = rng.standard_normal((2, d)) * rng.uniform(0.1, 3.0) * r
        fx, gx = rho_alpha(x, alpha, L1, L2)
        fy, _ = rho_alpha(y, alpha, L1, L2)
        fm, _ = rho_alpha(0.5 * (x + y), alpha, L1, L2)
        convex_bad += fm > 0.5 * (fx + fy) + 1e-10
        nx = np.linalg.norm(x)
        if abs(nx - r) <= 1e-3 * r:
            continue
        h = 1e-6 * max(nx, 1.0)
        fd = np.array([(rho_alpha(x + h * e, alpha, L1, L2)[0] - rho_alpha(x - h * e, alpha, L1, L2)[0]) / (2 * h)
                       for e in np.eye(d)])
        grad_bad += np.linalg.norm(fd - gx) > 1e-6 * max(np.linalg.norm(gx), 1e-8 * L1 * r)
        u = rng.standard_normal(d)
        quad = u @ hinge_penalty_hvp(x, u, r, L1)
        hess_checked += 1
        hess_bad += not (-1e-12 <= quad <= 4 * L1 * (u @ u))
    ok = convex_bad == 0 and grad_bad == 0 and hess_bad == 0
    record(9, ok, f"1000 triples: midpoint violations {convex_bad}; gradient mismatches {grad_bad}; "
                  f"Hessian-action violations {hess_bad}/{hess_checked}")
    assert ok


def test_criterion_10_determinism(tmp_path):
    mismatched, compared = [], 0
    for pid in ("doublewell:d=10", "random:d=20", "rosenbrock:d=2"):
        for solver in SOLVERS:
            if solver == "strict-saddle" and build_problem(pid).sigma1 is None:
                continue
            blobs = []
            for rep in range(2):
                o = run_one(pid, solver, 1e-3, 7)
                meta = {"run_id": o.run_id, "solver": solver, "problem": pid, "eps": 1e-3, "seed": 7}
                path = write_trace(tmp_path / f"{rep}.csv", o.rows, meta, "csv")
                blobs.append(path.read_bytes())
            compared += 1
            if blobs[0] != blobs[1]:
                mismatched.append((pid, solver))
    ok = compared > 0 and not mismatched
    record(10, ok, f"{compared} (problem, solver) pairs run twice; differing traces: {mismatched}")
    assert ok
