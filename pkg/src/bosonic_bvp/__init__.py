"""Poisson kernels and Dirichlet problems for bosonic Laplacians D_k on the half-space and the unit ball."""
from .clifford import Multivector, MoebiusTransform, cayley, cayley_inverse, cayley_jacobian, reflect
from .errors import (
    BosonicError,
    BudgetError,
    DecayError,
    DimensionMismatch,
    DomainError,
    GuardError,
    NotInHkError,
    PoleError,
    QuadratureError,
)
from .harmonic import HarmonicBasis, MultiPoly, harmonic_basis, harmonic_dimension, omega
from .kernels import KernelConstants, c_mk, poisson_ball, poisson_half
from .operator import FieldHk, apply_Dk_fd, apply_Dk_poly
from .quadrature import QuadratureRule, ball_rule, hyperplane_rule, integrate, sphere_rule
from .solver import (
    BoundaryDatum,
    RuleSettings,
    SolutionField,
    lp_norm,
    poisson_integral_ball,
    poisson_integral_half,
    solution_field_ball,
    solution_field_half,
)
from .zonal import ZonalKernel, zonal_eval

__version__ = "0.1.0"
