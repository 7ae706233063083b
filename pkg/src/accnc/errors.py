"""Exception types raised by the solvers and the benchmark layer."""

from __future__ import annotations

from typing import Any

import numpy as np


class AccncError(Exception):
    """Base class for all package errors."""


class NonFiniteOracleError(AccncError, FloatingPointError):
    """An oracle returned NaN or inf."""

    def __init__(self, what: str, point: np.ndarray):
        self.what = what
        self.point = np.array(point, copy=True)
        super().__init__(f"non-finite {what} at point with norm {np.linalg.norm(point):.6g}")


class DomainError(AccncError):
    """An iterate left the box on which the smoothness constants are certified."""

    def __init__(self, point: np.ndarray, lower: np.ndarray, upper: np.ndarray):
        self.point = np.array(point, copy=True)
        self.lower = lower
        self.upper = upper
        worst = float(np.max(np.maximum(lower - point, point - upper)))
        super().__init__(f"point outside certified box (violation {worst:.3g})")


class NonConvergenceError(AccncError):
    """An iteration cap derived from the theoretical bound was exceeded.

    This almost always means a precondition was violated, e.g. a wrong
    smoothness constant or a function that is not strongly convex.
    """

    def __init__(self, message: str, *, phase: str = "", trace: Any = None, iterations: int = 0):
        self.phase = phase
        self.trace = trace
        self.iterations = iterations
        prefix = f"[{phase}] " if phase else ""
        super().__init__(prefix + message)


class ConfigError(AccncError, ValueError):
    """Invalid solver or benchmark configuration."""
