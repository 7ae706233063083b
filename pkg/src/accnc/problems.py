"""Built-in test problems with certified smoothness constants.

Problems are addressed by string ids such as ``"quadratic:d=50:kappa=100"``
or ``"doublewell:d=20"``.  Every problem reports L1, L2 and an optimality
gap bound valid on its stated domain (``box``; ``None`` means all of R^d).
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError
from .oracle import Oracle, QuadraticOracle, SmoothnessParams

RNG_NAME = "numpy.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class TestProblem:
    """An oracle bundled with its constants and verification-only extras."""

    __test__ = False  # not a pytest class

    name: str
    oracle: Oracle
    params: SmoothnessParams
    x0: np.ndarray
    dense_hessian: Callable[[np.ndarray], np.ndarray]
    tags: frozenset = frozenset()
    known_minimum: Optional[float] = None
    known_minimizers: Optional[list] = None
    lower_bound: Optional[float] = None
    box: Optional[tuple] = None
    sigma1: Optional[float] = None
    nearest_minimizer: Optional[Callable[[np.ndarray], np.ndarray]] = None
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.oracle.dim

    def delta_f_at(self, x: np.ndarray) -> float:
        """Optimality-gap bound ``f(x) - inf f`` (uncounted evaluation)."""
        lb = self.known_minimum if self.known_minimum is not None else self.lower_bound
        if lb is None:
            raise ValueError(f"{self.name}: no lower bound known; supply delta_f explicitly")
        return float(self.oracle._value(np.asarray(x, float)) - lb)

    def in_box(self, x: np.ndarray) -> bool:
        if self.box is None:
            return True
        lo, hi = self.box
        return bool(np.all(x >= lo) and np.all(x <= hi))

    def fresh(self) -> "TestProblem":
        """Same problem with a new oracle instance (zeroed counters)."""
        prob = copy.deepcopy(self)
        prob.oracle.reset_counts()
        return prob


def _random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


# -- (a) convex quadratic ---------------------------------------------------

def convex_quadratic(d: int = 20, kappa: float = 100.0, L: float = 1.0, seed: int = 0) -> TestProblem:
    rng = make_rng(seed)
    mu = L / kappa
    spectrum = np.geomspace(mu, L, d) if d > 1 else np.array([L])
    Q = _random_orthogonal(rng, d)
    A = (Q * spectrum) @ Q.T
    A = 0.5 * (A + A.T)
    oracle = QuadraticOracle(A, name="quadratic")
    x0 = rng.standard_normal(d)
    x0 /= np.linalg.norm(x0)
    f0 = 0.5 * x0 @ A @ x0
    # constant Hessian: any positive L2 is a valid Lipschitz constant
    params = SmoothnessParams(L1=float(L), L2=1.0, delta_f=max(f0, 1e-12))
    return TestProblem(
        name=f"quadratic:d={d}:kappa={kappa:g}", oracle=oracle, params=params, x0=x0,
        dense_hessian=lambda x, A=A: A.copy(), tags=frozenset({"convex", "quadratic"}),
        known_minimum=0.0, known_minimizers=[np.zeros(d)], lower_bound=0.0,
        sigma1=float(mu), nearest_minimizer=lambda x, d=d: np.zeros(d),
        meta={"spectrum": spectrum, "mu": mu, "A": A},
    )


# -- (b) non-convex quadratic, one negative eigenvalue ----------------------

def negative_quadratic(d: int = 20, neg: float = 0.5, L: float = 1.0, seed: int = 0) -> TestProblem:
    """Unbounded below; meant for curvature detection, not for full solves."""
    rng = make_rng(seed)
    pos = np.linspace(neg, L, d - 1) if d > 1 else np.array([])
    spectrum = np.concatenate([[-neg], pos])
    Q = _random_orthogonal(rng, d)
    A = (Q * spectrum) @ Q.T
    A = 0.5 * (A + A.T)
    oracle = QuadraticOracle(A, name="negquad")
    params = SmoothnessParams(L1=float(L), L2=1.0, delta_f=1.0)
    return TestProblem(
        name=f"negquad:d={d}:neg={neg:g}", oracle=oracle, params=params, x0=np.zeros(d),
        dense_hessian=lambda x, A=A: A.copy(), tags=frozenset({"nonconvex", "quadratic", "unbounded"}),
        meta={"spectrum": spectrum, "neg_direction": Q[:, 0].copy(), "A": A},
    )


# -- (c) separable double well with chain coupling --------------------------

class DoubleWellOracle(Oracle):
    """``sum_i (x_i^2 - 1)^2 + (c/2) sum_i (x_i - x_{i+1})^2``."""

    def __init__(self, d: int, coupling: float = 0.0, box=None):
        super().__init__(d, box=box, name="doublewell")
        self.c = float(coupling)

    def _value(self, x):
        w = x * x - 1.0
        val = w @ w
        if self.c and self.dim > 1:
            dx = np.diff(x)
            val += 0.5 * self.c * (dx @ dx)
        return val

    def _grad(self, x):
        g = 4.0 * x * (x * x - 1.0)
        if self.c and self.dim > 1:
            dx = np.diff(x)
            g[:-1] -= self.c * dx
            g[1:] += self.c * dx
        return g

    def _hvp(self, x, v):
        p = (12.0 * x * x - 4.0) * v
        if self.c and self.dim > 1:
            dv = np.diff(v)
            p[:-1] -= self.c * dv
            p[1:] += self.c * dv
        return p

    def hessian(self, x):
        H = np.diag(12.0 * x * x - 4.0)
        if self.c and self.dim > 1:
            lap = np.diag(np.r_[1.0, 2.0 * np.ones(self.dim - 2), 1.0]) if self.dim > 2 else np.diag([1.0, 1.0])
            lap -= np.diag(np.ones(self.dim - 1), 1) + np.diag(np.ones(self.dim - 1), -1)
            H += self.c * lap
        return H


def double_well(d: int = 20, coupling: float = 0.0, bound: float = 2.0) -> TestProblem:
    box = (-bound * np.ones(d), bound * np.ones(d))
    oracle = DoubleWellOracle(d, coupling, box=box)
    L1 = max(12.0 * bound**2 - 4.0, 4.0) + 4.0 * coupling
    L2 = 24.0 * bound
    x0 = np.zeros(d)
    minimizers = [np.ones(d), -np.ones(d)]
    sigma1 = None
    nearest = None
    if coupling == 0.0:
        # every sign pattern is a nondegenerate local (and global) minimizer
        sigma1 = 3.5
        nearest = lambda x: np.where(x >= 0, 1.0, -1.0)
    return TestProblem(
        name=f"doublewell:d={d}" + (f":coupling={coupling:g}" if coupling else ""),
        oracle=oracle, params=SmoothnessParams(L1, L2, float(d)), x0=x0,
        dense_hessian=oracle.hessian, tags=frozenset({"nonconvex", "strict-saddle"}),
        known_minimum=0.0, known_minimizers=minimizers, lower_bound=0.0, box=box,
        sigma1=sigma1, nearest_minimizer=nearest, meta={"coupling": coupling},
    )


# -- (d) chained Rosenbrock ---------------------------------------------------

class RosenbrockOracle(Oracle):
    """``sum_i (1 - x_i)^2 + b (x_{i+1} - x_i^2)^2``."""

    def __init__(self, d: int, b: float, box=None):
        super().__init__(d, box=box, name="rosenbrock")
        self.b = float(b)

    def _value(self, x):
        r = x[1:] - x[:-1] ** 2
        s = 1.0 - x[:-1]
        return s @ s + self.b * (r @ r)

    def _grad(self, x):
        r = x[1:] - x[:-1] ** 2
        g = np.zeros_like(x)
        g[:-1] = -2.0 * (1.0 - x[:-1]) - 4.0 * self.b * x[:-1] * r
        g[1:] += 2.0 * self.b * r
        return g

    def _hvp(self, x, v):
        return self.hessian(x) @ v

    def hessian(self, x):
        d, b = self.dim, self.b
        H = np.zeros((d, d))
        i = np.arange(d - 1)
        H[i, i] += 2.0 + 12.0 * b * x[:-1] ** 2 - 4.0 * b * x[1:]
        H[i + 1, i + 1] += 2.0 * b
        H[i, i + 1] = H[i + 1, i] = -4.0 * b * x[:-1]
        return H


def rosenbrock(d: int = 2, b: float = 10.0, bound: float = 2.0) -> TestProblem:
    if d < 2:
        raise ConfigError("rosenbrock needs d >= 2")
    box = (-bound * np.ones(d), bound * np.ones(d))
    oracle = RosenbrockOracle(d, b, box=box)
    B = bound
    L1 = 2.0 + 12.0 * b * B**2 + 4.0 * b * B + 2.0 * b + 8.0 * b * B
    L2 = b * np.sqrt(1152.0 * B**2 + 64.0)
    x0 = np.ones(d)
    x0[0::2] = -1.2
    f0 = oracle._value(x0)
    return TestProblem(
        name=f"rosenbrock:d={d}:b={b:g}", oracle=oracle, params=SmoothnessParams(L1, float(L2), f0),
        x0=x0, dense_hessian=oracle.hessian, tags=frozenset({"nonconvex"}),
        known_minimum=0.0, known_minimizers=[np.ones(d)], lower_bound=0.0, box=box,
        meta={"b": b},
    )


# -- (e) random smooth non-convex ---------------------------------------------

@lru_cache(maxsize=None)
def _tail_bounds(p: float) -> tuple[float, float]:
    """Sup of |psi''| and |psi'''| for psi(u) = (1 + u^2)^(-p/2), with 5% margin."""
    m = p / 2.0
    u = np.concatenate([np.linspace(0.0, 20.0, 400001), np.geomspace(20.0, 1e6, 20001)])
    s = 1.0 + u * u
    d2 = 2.0 * m * s ** (-m - 2.0) * np.abs(1.0 - (2.0 * m + 1.0) * u * u)
    d3 = 4.0 * m * (m + 1.0) * u * s ** (-m - 3.0) * np.abs(3.0 - (2.0 * m + 1.0) * u * u)
    return 1.05 * float(d2.max()), 1.05 * float(d3.max())


class RandomNonconvexOracle(Oracle):
    """Quadratic plus bounded smooth perturbation.

    ``f(x) = 0.5 x^T A x + sum_k a_k cos(w_k^T x + b_k) + h * psi(t / s)``
    with ``t = q^T x``.  ``A`` is PSD and singular along the unit vector
    ``q``, every ``w_k`` is orthogonal to ``q``, and
    ``psi(u) = (1 + u^2)^(-p/2)``.  Along ``q`` the function is non-convex
    near ``t = 0`` and then decays polynomially, so ``inf f`` is approached
    only as ``|t| -> inf`` and small gradient norms require long travel.
    """

    def __init__(self, A, W, amps, phases, q, height, scale, power):
        super().__init__(A.shape[0], name="random")
        self.A = A
        self.W = W
        self.amps = amps
        self.phases = phases
        self.q = q
        self.height = float(height)
        self.scale = float(scale)
        self.power = float(power)

    def _tail(self, t):
        m = self.power / 2.0
        u = t / self.scale
        s = 1.0 + u * u
        h = self.height
        val = h * s**-m
        d1 = -2.0 * m * u * s ** (-m - 1.0) * h / self.scale
        d2 = -2.0 * m * s ** (-m - 2.0) * (1.0 - (2.0 * m + 1.0) * u * u) * h / self.scale**2
        return val, d1, d2

    def _value(self, x):
        return (0.5 * x @ (self.A @ x) + self.amps @ np.cos(self.W @ x + self.phases)
                + self._tail(self.q @ x)[0])

    def _grad(self, x):
        s = np.sin(self.W @ x + self.phases)
        return self.A @ x - self.W.T @ (self.amps * s) + self._tail(self.q @ x)[1] * self.q

    def _hvp(self, x, v):
        c = np.cos(self.W @ x + self.phases)
        return (self.A @ v - self.W.T @ (self.amps * c * (self.W @ v))
                + self._tail(self.q @ x)[2] * (self.q @ v) * self.q)

    def hessian(self, x):
        c = np.cos(self.W @ x + self.phases)
        return self.A - (self.W.T * (self.amps * c)) @ self.W + self._tail(self.q @ x)[2] * np.outer(self.q, self.q)


def random_nonconvex(d: int = 50, seed: int = 0, n_waves: int = 8, lam_min: float = 0.2,
                     lam_max: float = 1.0, wave_amp: float = 0.1, wave_freq: float = 0.5,
                     height: float = 0.05, scale: float = 0.5, power: float = 0.1,
                     start: float = 1.0) -> TestProblem:
    rng = make_rng(seed)
    Q = _random_orthogonal(rng, d)
    q = Q[:, 0].copy()
    rest = Q[:, 1:]
    lam = rng.uniform(lam_min, lam_max, d - 1)
    A = (rest * lam) @ rest.T
    A = 0.5 * (A + A.T)
    W = rng.standard_normal((n_waves, d))
    W -= np.outer(W @ q, q)
    W *= wave_freq / np.linalg.norm(W, axis=1, keepdims=True)
    amps = wave_amp * rng.uniform(0.5, 1.0, n_waves)
    phases = rng.uniform(0.0, 2.0 * np.pi, n_waves)
    oracle = RandomNonconvexOracle(A, W, amps, phases, q, height, scale, power)

    sup2, sup3 = _tail_bounds(power)
    wn = np.linalg.norm(W, axis=1)
    L1 = float(lam.max() + np.sum(amps * wn**2) + height * sup2 / scale**2)
    L2 = float(np.sum(amps * wn**3) + height * sup3 / scale**3)
    lower = -float(np.sum(amps))
    x0 = 0.5 * rest @ rng.standard_normal(d - 1) / np.sqrt(d - 1) + start * scale * q
    f0 = oracle._value(x0)
    return TestProblem(
        name=f"random:d={d}:seed={seed}", oracle=oracle, params=SmoothnessParams(L1, L2, f0 - lower),
        x0=x0, dense_hessian=oracle.hessian, tags=frozenset({"nonconvex", "random"}),
        lower_bound=lower, meta={"q": q, "power": power},
    )


# -- registry -------------------------------------------------------------------

def _num(s: str):
    v = float(s)
    return int(v) if v.is_integer() and "." not in s and "e" not in s.lower() else v


def parse_problem_id(pid: str) -> tuple[str, dict]:
    """Split ``"name:key=val:..."`` into the name and a dict of numeric options."""
    parts = [p for p in pid.strip().split(":") if p]
    if not parts:
        raise ConfigError("empty problem id")
    opts = {}
    for part in parts[1:]:
        if "=" not in part:
            raise ConfigError(f"malformed option {part!r} in problem id {pid!r}")
        k, v = part.split("=", 1)
        try:
            opts[k.strip()] = _num(v.strip())
        except ValueError:
            raise ConfigError(f"non-numeric option {k}={v!r} in problem id {pid!r}") from None
    return parts[0], opts


_BUILDERS = {
    "quadratic": convex_quadratic,
    "negquad": negative_quadratic,
    "doublewell": double_well,
    "rosenbrock": rosenbrock,
    "random": random_nonconvex,
}
_SEEDED = {"quadratic", "negquad", "random"}


def build_problem(pid: str, seed: int = 0) -> TestProblem:
    """Instantiate a problem from its id; ``seed`` is used unless the id pins one."""
    name, opts = parse_problem_id(pid)
    if name not in _BUILDERS:
        raise ConfigError(f"unknown problem {name!r}; known: {sorted(_BUILDERS)}")
    if name in _SEEDED:
        opts.setdefault("seed", seed)
    try:
        prob = _BUILDERS[name](**opts)
    except TypeError as exc:
        raise ConfigError(f"bad options for {name!r}: {exc}") from None
    prob.meta["suite_seed"] = seed
    prob.meta["id"] = pid
    prob.name = pid if ":" in pid else prob.name
    return prob


def make_test_suite(seed: int = 0) -> list[TestProblem]:
    """The standard battery: one problem of each family."""
    ids = [
        "quadratic:d=20:kappa=100",
        "negquad:d=20",
        "doublewell:d=20",
        "rosenbrock:d=2",
        "random:d=50",
    ]
    return [build_problem(pid, seed) for pid in ids]
