"""Log-log regression of oracle calls against 1/eps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy import stats

from ..errors import ConfigError

MIN_EPS_VALUES = 4
MIN_DECADES = 1.5


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r2: float
    n: int
    ci_low: float
    ci_high: float


def _get(row, key):
    return row[key] if isinstance(row, Mapping) else getattr(row, key)


def fit_scaling(rows: Iterable, *, value: str = "median_calls", level: float = 0.95) -> ScalingFit:
    """OLS of ``log(row[value])`` on ``log(1/eps)``.

    ``rows`` are summary rows (objects or mappings with ``eps`` and
    ``value``) for one problem and solver.  Refuses with :class:`ConfigError`
    unless there are at least four distinct eps values spanning 1.5 decades.
    Rows whose value is not a positive finite number are ignored.
    """
    pts = {}
    for r in rows:
        e, c = float(_get(r, "eps")), float(_get(r, value))
        if e > 0 and math.isfinite(c) and c > 0:
            pts[e] = c
    if len(pts) < MIN_EPS_VALUES:
        raise ConfigError(f"need at least {MIN_EPS_VALUES} distinct eps values with data, got {len(pts)}")
    eps = np.array(sorted(pts))
    span = math.log10(eps[-1] / eps[0])
    if span < MIN_DECADES - 1e-12:
        raise ConfigError(f"eps values span {span:.2f} decades; at least {MIN_DECADES} required")
    x = np.log(1.0 / eps)
    y = np.log([pts[e] for e in eps])
    res = stats.linregress(x, y)
    n = len(x)
    half = float(stats.t.ppf(0.5 + level / 2.0, n - 2) * res.stderr)
    r2 = float(res.rvalue**2) if np.ptp(y) > 0 else 1.0
    return ScalingFit(slope=float(res.slope), intercept=float(res.intercept), r2=r2, n=n,
                      ci_low=float(res.slope) - half, ci_high=float(res.slope) + half)


def fit_all(summary_rows: Iterable, *, value: str = "median_calls") -> dict:
    """Fit every (problem, solver) group that has enough eps coverage."""
    groups: dict = {}
    for r in summary_rows:
        groups.setdefault((_get(r, "problem"), _get(r, "solver")), []).append(r)
    fits = {}
    for key, rows in groups.items():
        try:
            fits[key] = fit_scaling(rows, value=value)
        except ConfigError:
            continue
    return fits
