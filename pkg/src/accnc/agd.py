"""Nesterov's accelerated gradient descent for strongly convex functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonConvergenceError
from .oracle import Oracle


@dataclass
class AgdResult:
    y: np.ndarray
    iterations: int
    grad_cost: int
    grad_norm: float
    iteration_bound: float
    grad: np.ndarray = None


def momentum_coefficient(L1: float, sigma1: float) -> float:
    """``(sqrt(kappa) - 1) / (sqrt(kappa) + 1)`` with ``kappa = L1 / sigma1``."""
    rk = math.sqrt(L1 / sigma1)
    return (rk - 1.0) / (rk + 1.0)


def agd_iteration_bound(L1: float, sigma1: float, eps: float, delta_g: float) -> float:
    """Iteration count after which the gradient norm is guaranteed below ``eps``."""
    arg = 4.0 * L1**2 * delta_g / (sigma1 * eps**2)
    return 1.0 + math.sqrt(L1 / sigma1) * max(0.0, math.log(arg)) if arg > 0 else 1.0


def accelerated_gradient_descent(
    g: Oracle,
    y1: np.ndarray,
    eps: float,
    L1: float,
    sigma1: float,
    *,
    delta_g: Optional[float] = None,
    cap_factor: float = 4.0,
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> AgdResult:
    """Minimize a ``sigma1``-strongly convex, ``L1``-smooth ``g`` until ``|grad g(y)| <= eps``.

    ``delta_g`` bounds ``g(y1) - inf g``; when omitted the strong-convexity
    bound ``|grad g(y1)|^2 / (2 sigma1)`` is used.  It only sets the safety
    cap (``cap_factor`` times the theoretical iteration count).

    ``callback(j, y_j)`` is invoked for every iterate before its stopping test.
    """
    if not sigma1 > 0:
        raise ValueError("sigma1 must be positive")
    if L1 < sigma1:
        raise ValueError("L1 must be at least sigma1")
    if not eps > 0:
        raise ValueError("eps must be positive")

    beta = momentum_coefficient(L1, sigma1)
    step = 1.0 / L1
    y = np.array(y1, dtype=float, copy=True)
    z = y.copy()
    cost = 0
    cap = None
    bound = None
    j = 1
    while True:
        if callback is not None:
            callback(j, y)
        gy = g.eval_grad(y)
        cost += 1
        gnorm = float(np.linalg.norm(gy))
        if gnorm <= eps:
            if bound is None:
                bound = 1.0
            return AgdResult(y=y, iterations=j, grad_cost=cost, grad_norm=gnorm, iteration_bound=bound,
                             grad=gy)
        if cap is None:
            dg = delta_g if delta_g is not None else gnorm**2 / (2.0 * sigma1)
            bound = agd_iteration_bound(L1, sigma1, eps, max(dg, 0.0))
            cap = int(math.ceil(cap_factor * bound))
        if j >= cap:
            raise NonConvergenceError(
                f"AGD exceeded {cap} iterations (|grad|={gnorm:.3e} > {eps:.3e}); "
                "is the function really strongly convex with these constants?",
                phase="agd", iterations=j)
        gz = g.eval_grad(z)
        cost += 1
        y_next = z - step * gz
        z = (1.0 + beta) * y_next - beta * y
        y = y_next
        j += 1
