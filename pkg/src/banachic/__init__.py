"""L^p interpolating splines, banachic kernels and B-splines, and a discrete p-Laplacian kernel."""

from .bsplines import BSplineSpec, bspline_as_spline, bspline_banachic, bspline_classical, dd_pairing, prop9_suite
from .core_maps import ConjugatePair, compose_exponent, conjugate_exponent, signed_power, signed_power_inverse_check
from .errors import (
    BanachicError,
    ConfigurationError,
    ConvergenceError,
    DegeneracyError,
    DomainError,
    IntegrandError,
)
from .functionals import (
    DualFunctional,
    ProblemSpace,
    apply_functional,
    default_nodes,
    divided_difference_coefficients,
    dual_basis,
    lagrange_basis,
)
from .kernels import KernelContext, cp_diag, cq_from_cp, gram_matrix, kernel_Ap, kernel_Cp, kernel_Rp
from .peano import PeanoKernel, peano_eval, representation_check, sard_representer, truncated_power
from .plaplace import GridField, TriangleGrid, discrete_energy, energy_gradient, solve_kernel
from .quadrature import QuadratureRule, integrate
from .solver import (
    ConstraintSet,
    SolverOptions,
    SplineSolution,
    dual_gradient,
    dual_objective,
    primal_objective,
    solve,
    spline_deriv_m,
    spline_eval,
    spline_pairing,
)

__all__ = [
    "BSplineSpec",
    "BanachicError",
    "ConfigurationError",
    "ConjugatePair",
    "ConstraintSet",
    "ConvergenceError",
    "DegeneracyError",
    "DomainError",
    "DualFunctional",
    "GridField",
    "IntegrandError",
    "KernelContext",
    "PeanoKernel",
    "ProblemSpace",
    "QuadratureRule",
    "SolverOptions",
    "SplineSolution",
    "TriangleGrid",
    "apply_functional",
    "bspline_as_spline",
    "bspline_banachic",
    "bspline_classical",
    "compose_exponent",
    "conjugate_exponent",
    "cp_diag",
    "cq_from_cp",
    "dd_pairing",
    "default_nodes",
    "discrete_energy",
    "divided_difference_coefficients",
    "dual_basis",
    "dual_gradient",
    "dual_objective",
    "energy_gradient",
    "gram_matrix",
    "integrate",
    "kernel_Ap",
    "kernel_Cp",
    "kernel_Rp",
    "lagrange_basis",
    "peano_eval",
    "primal_objective",
    "prop9_suite",
    "representation_check",
    "sard_representer",
    "signed_power",
    "signed_power_inverse_check",
    "solve",
    "solve_kernel",
    "spline_deriv_m",
    "spline_eval",
    "spline_pairing",
    "truncated_power",
]

__version__ = "0.1.0"
