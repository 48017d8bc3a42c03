"""Extinction probabilities of Markovian binary trees.

Solvers for the quadratic vector equation x = a + B(x kron x): classical
monotone fixed points, Newton's method, and a Perron iteration on the
survival form that accelerates near criticality, plus convergence-rate
analysis, problem generators, a Monte-Carlo oracle, and a benchmark CLI.
"""

from . import errors
from .analysis import (
    RateReport,
    critical_limit_rate,
    estimate_linear_rate,
    finite_difference_jacobian,
    perron_jacobian,
    perron_jacobian_at_solution,
    perron_map,
    spectral_radius,
)
from .core import (
    CriticalityReport,
    Problem,
    ResidualReport,
    apply_bilinear,
    criticality,
    left_matrix,
    load_problem,
    mean_matrix,
    problem_from_dict,
    problem_to_dict,
    residual,
    right_matrix,
    save_problem,
    survival_matrix,
    validate_problem,
)
from .eigen import SpectralPair, is_irreducible, maximal_eigenvector, perron_pair, pseudoinverse
from .problems import (
    Family,
    FamilySpec,
    McEstimate,
    find_param_for_rho,
    gen_family,
    gen_scalar,
    monte_carlo_extinction,
)
from .solvers import (
    SolverConfig,
    SolverResult,
    normalization_factor,
    solve_functional,
    solve_newton,
    solve_perron,
)

__version__ = "0.1.0"

__all__ = [
    "CriticalityReport",
    "Family",
    "FamilySpec",
    "McEstimate",
    "Problem",
    "RateReport",
    "ResidualReport",
    "SolverConfig",
    "SolverResult",
    "SpectralPair",
    "apply_bilinear",
    "critical_limit_rate",
    "criticality",
    "errors",
    "estimate_linear_rate",
    "find_param_for_rho",
    "finite_difference_jacobian",
    "gen_family",
    "gen_scalar",
    "is_irreducible",
    "left_matrix",
    "load_problem",
    "maximal_eigenvector",
    "mean_matrix",
    "monte_carlo_extinction",
    "normalization_factor",
    "perron_jacobian",
    "perron_jacobian_at_solution",
    "perron_map",
    "perron_pair",
    "problem_from_dict",
    "problem_to_dict",
    "pseudoinverse",
    "residual",
    "right_matrix",
    "save_problem",
    "solve_functional",
    "solve_newton",
    "solve_perron",
    "spectral_radius",
    "survival_matrix",
    "validate_problem",
]
