"""Exact classification of invariant-plane Hamiltonians with quartic
polynomial normal variational equations, with machine-checkable
incompatibility certificates and a numeric validation layer."""

from .mpoly import MPoly, Rational, poly_diff, poly_gcd, resultant
from .ratfunc import RatFunc
from .linsolve import solve_parametric_linear, determinant
from .jets import (EnkTable, DiffCondition, enk_table, generate_conditions,
                   lie_derivative, pullback_condition)
from .odes import (Branch, LinearODE, NonlinearODE, SolutionBasis,
                   center_and_reduce, degeneration_branches, rational_kernel,
                   residual, specialize_quartic)
from .certify import (Certificate, QuadraticForm, build_Q, conic_incompatibility,
                      extract_forms, verify_quartic_theorem)
from .potential import Potential, format_canonical, parse_potential
from .dynamics import (NumericPotential, Trajectory, integrate_hamilton,
                       nve_coefficient_samples, polynomial_degree_test,
                       variational_consistency)

__version__ = "0.1.0"
