"""Matrix-free approximate smallest eigenvector of the Hessian.

Both solvers work on the shifted operator ``M v = L1 v - H v``, which is PSD
when ``f`` is L1-smooth, and look for its top eigenvector.  A vector with
``v^T M v >= lambda_max(M) - eps`` is an additive ``eps``-approximate
smallest eigenvector of ``H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .oracle import Oracle

DEFAULT_BUDGET_CONSTANT = 8.0

RngLike = Union[None, int, np.random.Generator]


@dataclass
class EigenEstimate:
    v: np.ndarray
    rayleigh: float
    hvp_cost: int
    target_accuracy: float
    failure_prob: float
    iterations: int = 0
    budget: int = 0
    degraded: bool = False
    breakdown: bool = False
    method: str = "lanczos"
    # top Ritz value of the shifted operator after each iteration
    history: list = field(default_factory=list)


def _as_rng(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.PCG64(0 if rng is None else rng))


def _start_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d)
    n = np.linalg.norm(v)
    while n == 0.0:  # pragma: no cover
        v = rng.standard_normal(d)
        n = np.linalg.norm(v)
    return v / n


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def _ritz(alphas, betas):
    if len(alphas) == 1:
        return np.array(alphas, dtype=float), np.ones((1, 1))
    return eigh_tridiagonal(np.array(alphas), np.array(betas))


def lanczos_budget(L1: float, eps_add: float, dim: int, delta: float,
                   C: float = DEFAULT_BUDGET_CONSTANT) -> int:
    """``ceil(C * sqrt(L1/eps) * log(d/delta)) + 1`` iterations."""
    if eps_add > 2.0 * L1:
        return 1
    return int(math.ceil(C * math.sqrt(L1 / eps_add) * math.log(max(dim, 2) / delta))) + 1


def power_budget(L1: float, eps_add: float, dim: int, delta: float,
                 C: float = DEFAULT_BUDGET_CONSTANT) -> int:
    """``ceil(C * (L1/eps) * log(d/delta))`` iterations."""
    if eps_add > 2.0 * L1:
        return 1
    return int(math.ceil(C * (L1 / eps_add) * math.log(max(dim, 2) / delta)))


def _check_args(eps_add, delta, L1):
    if not eps_add > 0:
        raise ValueError("eps_add must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not L1 > 0:
        raise ValueError("L1 must be positive")


def min_eigvec_lanczos(oracle: Oracle, x: np.ndarray, eps_add: float, delta: float, L1: float,
                       *, rng: RngLike = None, C: float = DEFAULT_BUDGET_CONSTANT,
                       max_iter: Optional[int] = None, track_history: bool = False) -> EigenEstimate:
    """Lanczos with full reorthogonalization on ``L1 I - H(x)``.

    Runs ``min(budget, dim)`` iterations unless the Krylov space becomes
    invariant first.  If the budget runs out before that and the Ritz
    residual still exceeds ``eps_add`` the estimate is flagged ``degraded``.
    """
    _check_args(eps_add, delta, L1)
    x = np.asarray(x, dtype=float)
    d = oracle.dim
    rng = _as_rng(rng)
    budget = lanczos_budget(L1, eps_add, d, delta, C)
    if max_iter is not None:
        budget = min(budget, int(max_iter))
    n_iter = min(budget, d)

    Q = np.zeros((n_iter, d))
    alphas: list[float] = []
    betas: list[float] = []
    history: list[float] = []
    q = _start_vector(rng, d)
    breakdown = False
    cost = 0
    beta = 0.0
    for k in range(n_iter):
        Q[k] = q
        w = L1 * q - oracle.eval_hvp(x, q)
        cost += 1
        a = float(q @ w)
        alphas.append(a)
        w = w - a * q
        if k > 0:
            w = w - betas[-1] * Q[k - 1]
        basis = Q[: k + 1]
        for _ in range(2):
            w = w - basis.T @ (basis @ w)
        if track_history:
            history.append(float(_ritz(alphas, betas)[0][-1]))
        beta = float(np.linalg.norm(w))
        if beta <= 1e-12 * max(L1, abs(a), 1.0):
            breakdown = True
            break
        if k == n_iter - 1:
            break
        betas.append(beta)
        q = w / beta

    m = len(alphas)
    theta, S = _ritz(alphas, betas[: m - 1])
    top = int(np.argmax(theta))
    s = S[:, top]
    v = Q[:m].T @ s
    v /= np.linalg.norm(v)
    v = _canonical_sign(v)
    residual = abs(beta * s[-1])
    exhausted = (m == budget) and (m < d) and not breakdown
    return EigenEstimate(
        v=v, rayleigh=float(L1 - theta[top]), hvp_cost=cost, target_accuracy=eps_add,
        failure_prob=delta, iterations=m, budget=budget,
        degraded=bool(exhausted and residual > eps_add), breakdown=breakdown or m == d,
        method="lanczos", history=history,
    )


def min_eigvec_power(oracle: Oracle, x: np.ndarray, eps_add: float, delta: float, L1: float,
                     *, rng: RngLike = None, C: float = DEFAULT_BUDGET_CONSTANT,
                     max_iter: Optional[int] = None) -> EigenEstimate:
    """Power iteration on ``L1 I - H(x)`` for the full linear-rate budget."""
    _check_args(eps_add, delta, L1)
    x = np.asarray(x, dtype=float)
    rng = _as_rng(rng)
    budget = power_budget(L1, eps_add, oracle.dim, delta, C)
    if max_iter is not None:
        budget = min(budget, int(max_iter))
    v = _start_vector(rng, oracle.dim)
    history = []
    cost = 0
    breakdown = False
    for k in range(budget):
        w = L1 * v - oracle.eval_hvp(x, v)
        cost += 1
        theta = float(v @ w)
        history.append(theta)
        nw = float(np.linalg.norm(w))
        if nw <= 1e-300:
            breakdown = True
            break
        if k == budget - 1:
            break
        v = w / nw
    residual = float(np.linalg.norm(w - theta * v))
    sgn_v = _canonical_sign(v)
    return EigenEstimate(
        v=sgn_v, rayleigh=float(L1 - theta), hvp_cost=cost, target_accuracy=eps_add,
        failure_prob=delta, iterations=cost, budget=budget,
        degraded=bool(not breakdown and residual > eps_add), breakdown=breakdown,
        method="power", history=history,
    )


EIGEN_BACKENDS = {"lanczos": min_eigvec_lanczos, "power": min_eigvec_power}
