"""Hessian-free accelerated methods for smooth non-convex optimization.

Finds ``eps``-stationary points using only gradients and Hessian-vector
products, combining negative-curvature descent with accelerated gradient
descent on hinge-penalized, almost-convex models.
"""

from .agd import AgdResult, accelerated_gradient_descent
from .almost_convex import AlmostConvexResult, almost_convex_agd
from .curvature import NcdResult, negative_curvature_descent
from .driver import (RunReport, SolverConfig, accelerated_nonconvex, choose_alpha,
                     gradient_descent_baseline, rho_alpha, strict_saddle)
from .eigen import EigenEstimate, min_eigvec_lanczos, min_eigvec_power
from .errors import (AccncError, ConfigError, DomainError, NonConvergenceError,
                     NonFiniteOracleError)
from .oracle import (CallCounts, FunctionOracle, Oracle, QuadraticOracle, SmoothnessParams,
                     hvp_finite_diff)
from .problems import TestProblem, build_problem, make_test_suite

__version__ = "0.1.0"

__all__ = [
    "AgdResult", "accelerated_gradient_descent",
    "AlmostConvexResult", "almost_convex_agd",
    "NcdResult", "negative_curvature_descent",
    "RunReport", "SolverConfig", "accelerated_nonconvex", "choose_alpha",
    "gradient_descent_baseline", "rho_alpha", "strict_saddle",
    "EigenEstimate", "min_eigvec_lanczos", "min_eigvec_power",
    "AccncError", "ConfigError", "DomainError", "NonConvergenceError", "NonFiniteOracleError",
    "CallCounts", "FunctionOracle", "Oracle", "QuadraticOracle", "SmoothnessParams", "hvp_finite_diff",
    "TestProblem", "build_problem", "make_test_suite",
]
