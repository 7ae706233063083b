"""Stationary points of almost-convex functions via regularized AGD subproblems.

Each outer step minimizes ``g_j(z) = f(z) + gamma |z - z_j|^2`` (which is
``gamma``-strongly convex when ``f`` is ``gamma``-almost convex) to a tight
gradient tolerance with :func:`accelerated_gradient_descent`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .agd import accelerated_gradient_descent
from .errors import NonConvergenceError
from .oracle import Oracle, ProximalOracle
from .trace import Trace

INNER_SMOOTHNESS = ("l1_plus_2gamma", "l1")


@dataclass
class ProxStep:
    f_before: float
    f_after: float
    displacement: float
    inner_iterations: int
    inner_grad_cost: int


@dataclass
class AlmostConvexResult:
    z: np.ndarray
    outer_iterations: int
    inner_grad_cost: int
    start_value: float
    end_value: float
    grad_norm: float
    grad_cost: int = 0
    steps: list = field(default_factory=list)


def inner_tolerance(eps: float, gamma: float, L1: float) -> float:
    """Subproblem accuracy ``eps * sqrt(gamma / (50 (L1 + 2 gamma)))``."""
    return eps * math.sqrt(gamma / (50.0 * (L1 + 2.0 * gamma)))


def outer_iteration_bound(eps: float, gamma: float, delta_f: float) -> float:
    return 1.0 + 5.0 * gamma * delta_f / eps**2


def almost_convex_agd(
    f: Oracle,
    z1: np.ndarray,
    eps: float,
    gamma: float,
    L1: float,
    *,
    inner_smoothness: str = "l1_plus_2gamma",
    delta_f: Optional[float] = None,
    f_lower: Optional[float] = None,
    cap_factor: float = 4.0,
    inner_cap_factor: float = 4.0,
    record_values: bool = True,
    trace: Optional[Trace] = None,
) -> AlmostConvexResult:
    """Return ``z`` with ``|grad f(z)| <= eps`` for a ``gamma``-almost-convex, L1-smooth ``f``.

    ``delta_f`` (or ``f_lower``, a lower bound on ``f``) sets the outer
    safety cap; without either the loop is uncapped.  With
    ``record_values`` each outer step stores ``f`` before and after, at the
    price of value calls (never gradient calls).  A ``trace`` receives one
    ``acagd`` row per outer iteration.
    """
    if not 0 < gamma <= L1:
        raise ValueError("need 0 < gamma <= L1")
    if not eps > 0:
        raise ValueError("eps must be positive")
    if inner_smoothness not in INNER_SMOOTHNESS:
        raise ValueError(f"inner_smoothness must be one of {INNER_SMOOTHNESS}")

    eps_inner = inner_tolerance(eps, gamma, L1)
    L_inner = L1 + 2.0 * gamma if inner_smoothness == "l1_plus_2gamma" else L1
    z = np.array(z1, dtype=float, copy=True)
    start_value = f.eval_value(z) if (record_values or f_lower is not None) else math.nan
    if delta_f is None and f_lower is not None:
        delta_f = start_value - f_lower
    cap = None if delta_f is None else int(math.ceil(cap_factor * outer_iteration_bound(eps, gamma, delta_f)))

    steps: list[ProxStep] = []
    inner_cost = 0
    cost = 0
    f_cur = start_value
    j = 1
    while True:
        gz = f.eval_grad(z)
        cost += 1
        gnorm = float(np.linalg.norm(gz))
        if trace is not None:
            trace.record("acagd", j, f_cur, gnorm)
        if gnorm <= eps:
            return AlmostConvexResult(
                z=z, outer_iterations=j, inner_grad_cost=inner_cost, start_value=start_value,
                end_value=f_cur, grad_norm=gnorm, grad_cost=cost + inner_cost, steps=steps)
        if cap is not None and j >= cap:
            raise NonConvergenceError(
                f"almost-convex AGD exceeded {cap} outer iterations (|grad|={gnorm:.3e})",
                phase="acagd", trace=steps, iterations=j)
        g_j = ProximalOracle(f, z, gamma)
        delta_g = None
        if f_lower is not None and record_values:
            delta_g = max(f_cur - f_lower, 0.0)
        res = accelerated_gradient_descent(
            g_j, z, eps_inner, L_inner, gamma, delta_g=delta_g, cap_factor=inner_cap_factor)
        inner_cost += res.grad_cost
        z_next = res.y
        f_next = f.eval_value(z_next) if record_values else math.nan
        steps.append(ProxStep(f_before=f_cur, f_after=f_next,
                              displacement=float(np.linalg.norm(z_next - z)),
                              inner_iterations=res.iterations, inner_grad_cost=res.grad_cost))
        z = z_next
        f_cur = f_next
        j += 1
