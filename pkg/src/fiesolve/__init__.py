"""Chebyshev-collocation successive approximation for functional-integral equations.

Solves ``y(t) = f(t, int_a^b k(t, s) g(s, y(s)) ds)`` on ``[a, b]`` by Picard
iteration on Chebyshev coefficients, and checks the contraction constant,
weighted-norm contraction and a priori error bound numerically.
"""

from fiesolve.analysis import (
    ContractionReport,
    apriori_bound,
    bielecki_norm,
    contraction_constant,
    equivalence_constants,
    estimate_M1,
    lp_norm,
)
from fiesolve.chebyshev import (
    ChebApproximant,
    ChebGrid,
    Interval,
    QuadratureRule,
    cheb_eval,
    cheb_eval_series,
    cheb_grid,
    coeffs_from_values,
    collocation_matrix,
    integrate,
    quadrature_rule,
)
from fiesolve.problem import (
    HypothesisData,
    ProblemSpec,
    apply_operator,
    builtin_example,
    load_problem,
)
from fiesolve.solver import (
    SolveReport,
    SolverConfig,
    Termination,
    error_vs_exact,
    iteration_residual,
    picard_solve,
    quad_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "ChebApproximant",
    "ChebGrid",
    "ContractionReport",
    "HypothesisData",
    "Interval",
    "ProblemSpec",
    "QuadratureRule",
    "SolveReport",
    "SolverConfig",
    "Termination",
    "apply_operator",
    "apriori_bound",
    "bielecki_norm",
    "builtin_example",
    "cheb_eval",
    "cheb_eval_series",
    "cheb_grid",
    "coeffs_from_values",
    "collocation_matrix",
    "contraction_constant",
    "equivalence_constants",
    "error_vs_exact",
    "estimate_M1",
    "integrate",
    "iteration_residual",
    "load_problem",
    "lp_norm",
    "picard_solve",
    "quad_sweep",
    "quadrature_rule",
]
