"""Objective oracles: value, gradient and Hessian-vector product with call accounting.

Every solver in the package touches the objective only through an
:class:`Oracle`.  The counters on the *root* oracle are the cost model: one
gradient or one Hessian-vector product is one unit of work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NonFiniteOracleError

Vector = np.ndarray

_TINY = 1e-300


def _all_finite(a) -> bool:
    # a finite sum implies finite entries; fall back to the full check otherwise
    s = float(np.sum(a))
    return s - s == 0.0 or bool(np.isfinite(a).all())


@dataclass(frozen=True)
class SmoothnessParams:
    """Constants consumed by the solvers.

    L1 bounds the gradient Lipschitz constant, L2 the Hessian Lipschitz
    constant (operator norm) and delta_f bounds ``f(x1) - inf f``.
    """

    L1: float
    L2: float
    delta_f: float

    def __post_init__(self):
        for name in ("L1", "L2", "delta_f"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive and finite, got {val!r}")


@dataclass(frozen=True)
class CallCounts:
    value: int = 0
    grad: int = 0
    hvp: int = 0

    @property
    def total(self) -> int:
        """Oracle calls in the cost model (gradients plus HVPs)."""
        return self.grad + self.hvp

    def __sub__(self, other: "CallCounts") -> "CallCounts":
        return CallCounts(self.value - other.value, self.grad - other.grad, self.hvp - other.hvp)


class Oracle:
    """Base objective.  Subclasses implement ``_value``, ``_grad`` and optionally ``_hvp``.

    When ``_hvp`` is not overridden, :meth:`eval_hvp` falls back to a forward
    finite difference of gradients, charged as two gradient calls.
    """

    _checks_finite = True

    def __init__(self, dim: int, *, box: Optional[tuple[Vector, Vector]] = None, name: str = ""):
        if int(dim) <= 0:
            raise ValueError("dim must be a positive integer")
        self.dim = int(dim)
        self.name = name
        self.box = None
        if box is not None:
            lo, hi = box
            self.box = (np.broadcast_to(np.asarray(lo, float), (self.dim,)).copy(),
                        np.broadcast_to(np.asarray(hi, float), (self.dim,)).copy())
        self.value_calls = 0
        self.grad_calls = 0
        self.hvp_calls = 0

    # -- hooks ---------------------------------------------------------------
    def _value(self, x: Vector) -> float:
        raise NotImplementedError

    def _grad(self, x: Vector) -> Vector:
        raise NotImplementedError

    def _hvp(self, x: Vector, v: Vector) -> Vector:
        raise NotImplementedError

    @property
    def has_analytic_hvp(self) -> bool:
        return type(self)._hvp is not Oracle._hvp

    # -- counted API ---------------------------------------------------------
    def _check_point(self, x: Vector) -> Vector:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}, got shape {x.shape}")
        if self.box is not None:
            lo, hi = self.box
            if np.any(x < lo) or np.any(x > hi):
                raise DomainError(x, lo, hi)
        return x

    def eval_value(self, x: Vector) -> float:
        x = self._check_point(x)
        self.value_calls += 1
        val = float(self._value(x))
        if val - val != 0.0:
            raise NonFiniteOracleError("value", x)
        return val

    def eval_grad(self, x: Vector) -> Vector:
        x = self._check_point(x)
        self.grad_calls += 1
        g = np.asarray(self._grad(x), dtype=float)
        if self._checks_finite and not _all_finite(g):
            raise NonFiniteOracleError("gradient", x)
        return g

    def eval_hvp(self, x: Vector, v: Vector) -> Vector:
        if not self.has_analytic_hvp:
            return hvp_finite_diff(self, x, v)
        x = self._check_point(x)
        self.hvp_calls += 1
        p = np.asarray(self._hvp(x, np.asarray(v, dtype=float)), dtype=float)
        if self._checks_finite and not _all_finite(p):
            raise NonFiniteOracleError("Hessian-vector product", x)
        return p

    def counts(self) -> CallCounts:
        return CallCounts(self.value_calls, self.grad_calls, self.hvp_calls)

    def reset_counts(self) -> None:
        self.value_calls = self.grad_calls = self.hvp_calls = 0

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim}, name={self.name!r})"


class FunctionOracle(Oracle):
    """Oracle assembled from plain callables."""

    def __init__(self, dim: int, value: Callable[[Vector], float], grad: Callable[[Vector], Vector],
                 hvp: Optional[Callable[[Vector, Vector], Vector]] = None, **kwargs):
        super().__init__(dim, **kwargs)
        self._fv = value
        self._fg = grad
        self._fh = hvp

    def _value(self, x):
        return self._fv(x)

    def _grad(self, x):
        return self._fg(x)

    @property
    def has_analytic_hvp(self) -> bool:
        return self._fh is not None

    def _hvp(self, x, v):
        return self._fh(x, v)


class QuadraticOracle(Oracle):
    """``f(x) = 0.5 x^T A x - b^T x + c`` with constant symmetric ``A``."""

    def __init__(self, A, b=None, c: float = 0.0, **kwargs):
        A = np.asarray(A, dtype=float)
        super().__init__(A.shape[0], **kwargs)
        self.A = 0.5 * (A + A.T)
        self.b = np.zeros(self.dim) if b is None else np.asarray(b, dtype=float)
        self.c = float(c)

    def _value(self, x):
        return 0.5 * x @ self.A @ x - self.b @ x + self.c

    def _grad(self, x):
        return self.A @ x - self.b

    def _hvp(self, x, v):
        return self.A @ v


def default_fd_step(x: Vector, v: Vector) -> float:
    """Step balancing truncation against cancellation error."""
    eps = np.finfo(float).eps
    return float(np.sqrt(eps) * (1.0 + np.linalg.norm(x)) / max(np.linalg.norm(v), _TINY))


def hvp_finite_diff(oracle: Oracle, x: Vector, v: Vector, h: Optional[float] = None) -> Vector:
    """Forward-difference Hessian-vector product ``(grad(x + h v) - grad(x)) / h``.

    The error is at most ``h * L2 * |v|^2 / 2``.  Costs two gradient calls.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.linalg.norm(v) > 0:
        raise ValueError("direction v must be nonzero")
    if h is None:
        h = default_fd_step(x, v)
    if not h > 0:
        raise ValueError("finite-difference step h must be positive")
    g0 = oracle.eval_grad(x)
    g1 = oracle.eval_grad(x + h * v)
    return (g1 - g0) / h


def hinge_penalty(x: Vector, radius: float, weight: float) -> tuple[float, Vector]:
    """``weight * max(|x| - radius, 0)^2`` and its gradient."""
    x = np.asarray(x, dtype=float)
    r = math.sqrt(x @ x)
    excess = r - radius
    if excess <= 0.0 or r == 0.0:
        return 0.0, np.zeros_like(x)
    return weight * excess * excess, (2.0 * weight * excess / r) * x


def hinge_penalty_hvp(x: Vector, u: Vector, radius: float, weight: float) -> Vector:
    """Action of the penalty Hessian on ``u`` (zero inside the hinge radius)."""
    x = np.asarray(x, dtype=float)
    r = math.sqrt(x @ x)
    if r <= radius or r == 0.0:
        return np.zeros_like(x)
    xu = x @ u
    return 2.0 * weight * (u + radius * (x * xu / r**3 - u / r))


class ProximalOracle(Oracle):
    """``f(z) + gamma |z - center|^2``: one base gradient per gradient call."""

    _checks_finite = False  # the base oracle already checks

    def __init__(self, base: Oracle, center: Vector, gamma: float):
        super().__init__(base.dim, name=f"prox[{base.name}]")
        self.base = base
        self.center = np.array(center, dtype=float, copy=True)
        self.gamma = float(gamma)

    @property
    def root(self) -> Oracle:
        return root_oracle(self.base)

    def _check_point(self, x):
        return np.asarray(x, dtype=float)

    def _value(self, x):
        d = x - self.center
        return self.base.eval_value(x) + self.gamma * (d @ d)

    def _grad(self, x):
        return self.base.eval_grad(x) + 2.0 * self.gamma * (x - self.center)

    def _hvp(self, x, v):
        return self.base.eval_hvp(x, v) + 2.0 * self.gamma * v


class HingePenalizedOracle(Oracle):
    """``f(x) + weight * max(|x - center| - radius, 0)^2``.

    Value and gradient are composed analytically, so each gradient call
    charges exactly one base gradient call.
    """

    _checks_finite = False

    def __init__(self, base: Oracle, center: Vector, radius: float, weight: float):
        super().__init__(base.dim, name=f"hinge[{base.name}]")
        self.base = base
        self.center = np.array(center, dtype=float, copy=True)
        self.radius = float(radius)
        self.weight = float(weight)

    @property
    def root(self) -> Oracle:
        return root_oracle(self.base)

    def _check_point(self, x):
        return np.asarray(x, dtype=float)

    def penalty(self, x: Vector) -> tuple[float, Vector]:
        return hinge_penalty(x - self.center, self.radius, self.weight)

    def _value(self, x):
        return self.base.eval_value(x) + self.penalty(x)[0]

    def _grad(self, x):
        return self.base.eval_grad(x) + self.penalty(x)[1]

    def _hvp(self, x, v):
        return self.base.eval_hvp(x, v) + hinge_penalty_hvp(x - self.center, v, self.radius, self.weight)


def root_oracle(oracle: Oracle) -> Oracle:
    """Follow wrapper chains down to the oracle that owns the cost counters."""
    while hasattr(oracle, "base"):
        oracle = oracle.base
    return oracle
