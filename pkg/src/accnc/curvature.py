"""Negative-curvature descent: step along approximate smallest eigenvectors.

While the estimated curvature ``v^T H v`` is at most ``-alpha/2`` the method
steps ``2|v^T H v| / L2`` along ``-sign(v^T grad) v``, which decreases
``f`` by at least ``alpha^3 / (12 L2^2)``.  Otherwise it stops, and with
high probability ``lambda_min(H) >= -alpha`` at the returned point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .eigen import DEFAULT_BUDGET_CONSTANT, EIGEN_BACKENDS, RngLike, _as_rng
from .errors import NonConvergenceError
from .oracle import Oracle
from .trace import Trace


@dataclass
class NcdStep:
    rayleigh: float
    step_length: float
    eta_dot_grad: float
    f_before: float
    f_after: float
    grad_norm: float


@dataclass
class NcdResult:
    z: np.ndarray
    steps_taken: int
    eig_calls: int
    total_decrease: float
    certified: bool
    degraded: bool = False
    final_rayleigh: float = math.nan
    eig_failure_prob: float = math.nan
    steps: list = field(default_factory=list)


def per_call_failure_prob(delta: float, L2: float, delta_f: float, alpha: float) -> float:
    """``delta / (1 + 12 L2^2 delta_f / alpha^3)``, a union bound over the step budget."""
    return delta / (1.0 + 12.0 * L2**2 * delta_f / alpha**3)


def step_bound(L2: float, delta_f: float, alpha: float) -> float:
    """Maximum number of accepted steps: ``12 L2^2 delta_f / alpha^3``."""
    return 12.0 * L2**2 * delta_f / alpha**3


def negative_curvature_descent(
    f: Oracle,
    z1: np.ndarray,
    L2: float,
    alpha: float,
    delta_f: float,
    delta: float,
    L1: float,
    *,
    rng: RngLike = None,
    backend: str = "lanczos",
    C: float = DEFAULT_BUDGET_CONSTANT,
    cap_factor: float = 2.0,
    trace: Optional[Trace] = None,
) -> NcdResult:
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    eig = EIGEN_BACKENDS[backend]
    rng = _as_rng(rng)
    dprime = per_call_failure_prob(delta, L2, delta_f, alpha)
    cap = int(math.ceil(cap_factor * (step_bound(L2, delta_f, alpha) + 1.0)))

    z = np.array(z1, dtype=float, copy=True)
    f_start = f.eval_value(z)
    f_cur = f_start
    steps: list[NcdStep] = []
    degraded = False
    eig_calls = 0
    while True:
        est = eig(f, z, alpha / 2.0, dprime, L1, rng=rng, C=C)
        eig_calls += 1
        degraded |= est.degraded
        v = est.v
        ray = float(v @ f.eval_hvp(z, v))
        if ray > -alpha / 2.0:
            return NcdResult(z=z, steps_taken=len(steps), eig_calls=eig_calls,
                             total_decrease=f_start - f_cur, certified=True, degraded=degraded,
                             final_rayleigh=ray, eig_failure_prob=dprime, steps=steps)
        if len(steps) >= cap:
            raise NonConvergenceError(
                f"negative-curvature descent exceeded {cap} steps; L2 or delta_f is probably wrong",
                phase="ncd", trace=steps, iterations=len(steps))
        g = f.eval_grad(z)
        vg = float(v @ g)
        sign = 1.0 if vg >= 0.0 else -1.0
        length = 2.0 * abs(ray) / L2
        eta = length * sign
        z_next = z - eta * v
        f_next = f.eval_value(z_next)
        gnorm = float(np.linalg.norm(g))
        steps.append(NcdStep(rayleigh=ray, step_length=length, eta_dot_grad=eta * vg,
                             f_before=f_cur, f_after=f_next, grad_norm=gnorm))
        if trace is not None:
            trace.record("ncd", len(steps), f_cur, gnorm)
        z = z_next
        f_cur = f_next
