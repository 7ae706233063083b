"""Top-level solvers: the accelerated non-convex method, its strict-saddle
extension and the plain gradient-descent baseline."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .agd import accelerated_gradient_descent
from .almost_convex import AlmostConvexResult, almost_convex_agd
from .curvature import NcdResult, negative_curvature_descent
from .eigen import DEFAULT_BUDGET_CONSTANT, EIGEN_BACKENDS
from .errors import ConfigError, NonConvergenceError
from .oracle import HingePenalizedOracle, Oracle, SmoothnessParams, hinge_penalty
from .trace import Trace


@dataclass(frozen=True)
class SolverConfig:
    eps: float
    delta: float = 0.1
    alpha: Optional[float] = None
    seed: int = 0
    eig_backend: str = "lanczos"
    inner_smoothness: str = "l1_plus_2gamma"
    eig_constant: float = DEFAULT_BUDGET_CONSTANT
    outer_cap_factor: float = 2.0
    inner_cap_factor: float = 4.0
    thin_trace: bool = False

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError("eps must be positive")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.alpha is not None and not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if self.eig_backend not in EIGEN_BACKENDS:
            raise ConfigError(f"eig_backend must be one of {sorted(EIGEN_BACKENDS)}")
        if self.inner_smoothness not in ("l1_plus_2gamma", "l1"):
            raise ConfigError("inner_smoothness must be 'l1_plus_2gamma' or 'l1'")


@dataclass
class OuterRecord:
    """One outer iteration of the accelerated method."""

    k: int
    x_start: np.ndarray
    x_hat: np.ndarray
    f_hat: float
    grad_norm: float
    ncd: Optional[NcdResult] = None
    acagd: Optional[AlmostConvexResult] = None


@dataclass
class RunReport:
    solver: str
    x: np.ndarray
    grad_norm: float
    success: bool
    phase_trace: list
    grad_calls: int
    hvp_calls: int
    value_calls: int
    wallclock: float
    outer_iterations: int = 0
    alpha: float = math.nan
    K: int = 0
    outer: list = field(default_factory=list)
    phase2_calls: int = 0
    min_hessian_eig: Optional[float] = None
    error: Optional[str] = None

    @property
    def total_calls(self) -> int:
        return self.grad_calls + self.hvp_calls


def rho_alpha(x: np.ndarray, alpha: float, L1: float, L2: float) -> tuple[float, np.ndarray]:
    """Hinge penalty ``L1 * max(|x| - alpha/L2, 0)^2`` and its gradient."""
    return hinge_penalty(x, alpha / L2, L1)


def choose_alpha(eps: float, L1: float, L2: float, delta_f: float) -> float:
    """``min(L1, max(eps^2 / delta_f, sqrt(eps * L2)))``."""
    return min(L1, max(eps**2 / delta_f, math.sqrt(eps * L2)))


def outer_iteration_bound(eps: float, alpha: float, params: SmoothnessParams) -> float:
    L1, L2, df = params.L1, params.L2, params.delta_f
    if alpha < L1:
        return 2.0 + df * (12.0 * L2**2 / alpha**3 + math.sqrt(10.0) * L2 / (alpha * eps))
    return 2.0 + df * 16.0 * L1 / (3.0 * eps**2)


def _finish(solver, trace, x, gnorm, success, t0, **kw) -> RunReport:
    c = trace.spent()
    return RunReport(solver=solver, x=x, grad_norm=gnorm, success=success,
                     phase_trace=list(trace.entries), grad_calls=c.grad, hvp_calls=c.hvp,
                     value_calls=c.value, wallclock=time.perf_counter() - t0, **kw)


def accelerated_nonconvex(f: Oracle, x1: np.ndarray, params: SmoothnessParams, cfg: SolverConfig,
                          *, trace: Optional[Trace] = None) -> RunReport:
    """Alternate negative-curvature descent with almost-convex AGD on a hinge-penalized model.

    Returns a point with ``|grad f| <= cfg.eps``; with probability at least
    ``1 - cfg.delta`` its Hessian has smallest eigenvalue ``>= -2 alpha``.
    """
    t0 = time.perf_counter()
    L1, L2, df = params.L1, params.L2, params.delta_f
    eps = cfg.eps
    alpha = cfg.alpha if cfg.alpha is not None else choose_alpha(eps, L1, L2, df)
    if not 0 < alpha <= L1:
        raise ConfigError(f"alpha={alpha} must lie in (0, L1={L1}]")
    K = int(math.ceil(1.0 + df * (12.0 * L2**2 / alpha**3 + math.sqrt(10.0) * L2 / (alpha * eps))))
    delta_k = cfg.delta / K
    cap = int(math.ceil(cfg.outer_cap_factor * outer_iteration_bound(eps, alpha, params)))
    trace = trace if trace is not None else Trace(f)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    x = np.array(x1, dtype=float, copy=True)
    f_lower = f.eval_value(x) - df
    records: list[OuterRecord] = []
    k = 1
    while True:
        ncd = None
        if alpha < L1:
            try:
                ncd = negative_curvature_descent(
                    f, x, L2, alpha, df, delta_k, L1, rng=rng, backend=cfg.eig_backend,
                    C=cfg.eig_constant, trace=trace)
            except NonConvergenceError as exc:
                exc.trace = trace.entries
                raise
            x_hat = ncd.z
        else:
            x_hat = x
        g = f.eval_grad(x_hat)
        gnorm = float(np.linalg.norm(g))
        f_hat = f.eval_value(x_hat)
        trace.record("acagd", k, f_hat, gnorm)
        rec = OuterRecord(k=k, x_start=x, x_hat=x_hat, f_hat=f_hat, grad_norm=gnorm, ncd=ncd)
        records.append(rec)
        if gnorm <= eps:
            return _finish("accnc", trace, x_hat, gnorm, True, t0, outer_iterations=k,
                           alpha=alpha, K=K, outer=records)
        if k >= cap:
            raise NonConvergenceError(
                f"accelerated method exceeded {cap} outer iterations (|grad|={gnorm:.3e})",
                phase="accnc", trace=trace.entries, iterations=k)
        f_k = HingePenalizedOracle(f, x_hat, alpha / L2, L1)
        try:
            res = almost_convex_agd(
                f_k, x_hat, eps / 2.0, 3.0 * alpha, 5.0 * L1, inner_smoothness=cfg.inner_smoothness,
                f_lower=f_lower, cap_factor=2.0 * cfg.outer_cap_factor, inner_cap_factor=cfg.inner_cap_factor)
        except NonConvergenceError as exc:
            exc.trace = trace.entries
            raise
        rec.acagd = res
        x = res.z
        k += 1


def gradient_descent_baseline(f: Oracle, x1: np.ndarray, eps: float, L1: float, *,
                              delta_f: Optional[float] = None, cap_factor: float = 2.0,
                              thin_trace: bool = True, trace: Optional[Trace] = None) -> RunReport:
    """Fixed-step ``1/L1`` gradient descent until ``|grad f| <= eps``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    t0 = time.perf_counter()
    trace = trace if trace is not None else Trace(f, thin=thin_trace)
    cap = None if delta_f is None else int(math.ceil(cap_factor * (1.0 + 2.0 * L1 * delta_f / eps**2)))
    x = np.array(x1, dtype=float, copy=True)
    step = 1.0 / L1
    k = 1
    while True:
        g = f.eval_grad(x)
        gnorm = float(np.linalg.norm(g))
        done = gnorm <= eps
        if done or trace.wants(k):
            trace.record("gd", k, f.eval_value(x), gnorm)
        if done:
            return _finish("gd", trace, x, gnorm, True, t0, outer_iterations=k)
        if cap is not None and k >= cap:
            raise NonConvergenceError(f"gradient descent exceeded {cap} iterations",
                                      phase="gd", trace=trace.entries, iterations=k)
        x = x - step * g
        k += 1


def strict_saddle(f: Oracle, x1: np.ndarray, params: SmoothnessParams, sigma1: float,
                  cfg: SolverConfig) -> RunReport:
    """Two-phase method converging linearly to a local minimizer of a strict-saddle ``f``.

    Phase one runs the accelerated method to accuracy
    ``max(eps, sigma1^2 / (16 L2))``; phase two runs AGD on ``f`` plus a hinge
    penalty of radius ``sigma1 / (4 L2)`` around the phase-one point.
    """
    if not sigma1 > 0:
        raise ConfigError("sigma1 must be positive")
    t0 = time.perf_counter()
    L1, L2 = params.L1, params.L2
    eps = cfg.eps
    eps_bar = max(eps, sigma1**2 / (16.0 * L2))
    alpha = choose_alpha(eps_bar, L1, L2, params.delta_f)
    trace = Trace(f)
    phase1 = accelerated_nonconvex(f, x1, params, replace(cfg, eps=eps_bar, alpha=alpha), trace=trace)
    x_plus = phase1.x
    if not eps < eps_bar:
        return _finish("strict-saddle", trace, x_plus, phase1.grad_norm, True, t0,
                       outer_iterations=phase1.outer_iterations, alpha=alpha, K=phase1.K,
                       outer=phase1.outer)
    before = trace.spent().total
    radius = sigma1 / (4.0 * L2)
    f_plus = HingePenalizedOracle(f, x_plus, radius, L1)
    thin = Trace(f, thin=True)

    def _row(j, y):
        if thin.wants(j):
            trace.record("agd-phase2", j, f.eval_value(y), math.nan)

    try:
        res = accelerated_gradient_descent(f_plus, x_plus, eps, 5.0 * L1, sigma1 / 2.0,
                                           cap_factor=cfg.inner_cap_factor, callback=_row)
    except NonConvergenceError as exc:
        exc.phase = "agd-phase2"
        exc.trace = trace.entries
        raise
    x = res.y
    # grad f = grad f_plus - grad penalty; no extra oracle call needed
    g_f = float(np.linalg.norm(res.grad - f_plus.penalty(x)[1]))
    trace.record("agd-phase2", res.iterations, f.eval_value(x), g_f)
    return _finish("strict-saddle", trace, x, g_f, g_f <= eps, t0,
                   outer_iterations=phase1.outer_iterations, alpha=alpha, K=phase1.K,
                   outer=phase1.outer, phase2_calls=trace.spent().total - before)

