"""Quick invariant battery behind ``bench verify``.

Each check samples a property on the built-in suite and reports pass/fail
with a short detail string.  The full statistical versions live in the
test suite; these are sized to finish in well under a minute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..driver import SolverConfig, accelerated_nonconvex, rho_alpha
from ..eigen import min_eigvec_lanczos
from ..oracle import QuadraticOracle
from ..problems import TestProblem, make_rng, make_test_suite


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def sample_point(prob: TestProblem, rng: np.random.Generator, radius: float = 1.0) -> np.ndarray:
    """A random point in the problem's box, or near ``x0`` when unbounded."""
    if prob.box is not None:
        lo, hi = prob.box
        return rng.uniform(lo, hi)
    return prob.x0 + radius * rng.standard_normal(prob.dim) / math.sqrt(prob.dim)


def check_gradients(suite, rng, pairs: int = 20) -> CheckResult:
    worst = 0.0
    for prob in suite:
        f = prob.oracle
        for _ in range(pairs):
            x = sample_point(prob, rng)
            u = rng.standard_normal(prob.dim)
            u /= np.linalg.norm(u)
            h = 1e-5 * (1.0 + np.linalg.norm(x))
            if prob.box is not None:
                lo, hi = prob.box
                h = min(h, 0.5 * float(np.min(np.minimum(x - lo, hi - x))))
            fd = (f._value(x + h * u) - f._value(x - h * u)) / (2.0 * h)
            an = float(f._grad(x) @ u)
            worst = max(worst, abs(fd - an) / max(1.0, abs(an)))
    return CheckResult("gradient vs central differences", worst <= 1e-5, f"max rel err {worst:.2e}")


def check_hvp_symmetry(suite, rng, pairs: int = 20) -> CheckResult:
    worst = 0.0
    for prob in suite:
        for _ in range(pairs):
            x = sample_point(prob, rng)
            u, w = rng.standard_normal((2, prob.dim))
            a = u @ prob.oracle._hvp(x, w)
            b = w @ prob.oracle._hvp(x, u)
            worst = max(worst, abs(a - b) / (np.linalg.norm(u) * np.linalg.norm(w)))
    return CheckResult("HVP symmetry", worst <= 1e-6, f"max err {worst:.2e}")


def check_smoothness(suite, rng, pairs: int = 20) -> CheckResult:
    bad = []
    for prob in suite:
        f, p = prob.oracle, prob.params
        for _ in range(pairs):
            x, y = sample_point(prob, rng), sample_point(prob, rng)
            d = y - x
            dd = d @ d
            r1 = abs(f._value(y) - f._value(x) - f._grad(x) @ d) - 0.5 * p.L1 * dd
            r2 = np.linalg.norm(f._grad(y) - f._grad(x) - f._hvp(x, d)) - 0.5 * p.L2 * dd
            tol = 1e-9 * (1.0 + abs(f._value(x)))
            if r1 > tol or r2 > tol:
                bad.append(prob.name)
                break
    return CheckResult("smoothness certificates", not bad, "violations: " + (", ".join(bad) or "none"))


def check_lanczos(rng, runs: int = 50, d: int = 20, eps_add: float = 0.05, delta: float = 0.1) -> CheckResult:
    fails = 0
    for i in range(runs):
        Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        lam = rng.uniform(-3.0, 3.0, d)
        A = (Q * lam) @ Q.T
        est = min_eigvec_lanczos(QuadraticOracle(A), np.zeros(d), eps_add, delta, 3.0, rng=i)
        fails += est.rayleigh > lam.min() + eps_add
    return CheckResult("Lanczos additive accuracy", fails <= delta * runs, f"{fails}/{runs} misses")


def check_penalty(rng, triples: int = 200) -> CheckResult:
    worst = 0.0
    for _ in range(triples):
        x, y = rng.standard_normal((2, 5))
        lam = rng.uniform()
        mid = rho_alpha(lam * x + (1 - lam) * y, 0.5, 2.0, 1.0)[0]
        worst = max(worst, mid - lam * rho_alpha(x, 0.5, 2.0, 1.0)[0] - (1 - lam) * rho_alpha(y, 0.5, 2.0, 1.0)[0])
    return CheckResult("hinge penalty convexity", worst <= 1e-10, f"max violation {worst:.2e}")


def check_accnc_doublewell(suite) -> CheckResult:
    prob = next(p for p in suite if p.name.startswith("doublewell")).fresh()
    eps = 1e-3
    rep = accelerated_nonconvex(prob.oracle, prob.x0, prob.params, SolverConfig(eps=eps))
    lam = float(np.linalg.eigvalsh(prob.dense_hessian(rep.x))[0])
    ok = rep.grad_norm <= eps and lam >= -2.0 * math.sqrt(eps * prob.params.L2)
    return CheckResult("accnc escapes the double-well saddle", ok,
                       f"|grad|={rep.grad_norm:.2e}, lambda_min={lam:.3g}, calls={rep.total_calls}")


def run_checks(seed: int = 0) -> list[CheckResult]:
    rng = make_rng(seed)
    suite = make_test_suite(seed)
    checks: list[Callable[[], CheckResult]] = [
        lambda: check_gradients(suite, rng),
        lambda: check_hvp_symmetry(suite, rng),
        lambda: check_smoothness(suite, rng),
        lambda: check_lanczos(rng),
        lambda: check_penalty(rng),
        lambda: check_accnc_doublewell(suite),
    ]
    return [c() for c in checks]
