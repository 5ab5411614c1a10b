"""Fractional integrals and derivatives with respect to a weight psi, and
numerical verification of Iyengar-type integral inequalities built on them."""

from ._common import Side, integer_order
from .errors import (DomainError, EvalError, HypothesisError, NonConvergence, OrderError,
                     ParamError, PsiFracError, RangeError, RegimeError)
from .functions import TestFunction, boundary_flat, from_polynomial, psi_monomial, psi_polynomial, random_test_functions
from .iyengar import (CaputoNorms, CheckReport, InequalityInstance, Variant, check,
                      check_midpoint, check_partition, check_split, classical_iyengar,
                      iyengar_lhs, iyengar_rhs, midpoint_split, sweep_split)
from .norms import NormValue, Regime, sup_norm, theorem_coefficient, weighted_lp_norm
from .operators import (FracParams, caputo_derivative, caputo_function, rl_integral,
                        taylor_partial_sum, taylor_residual)
from .psi import PsiFunction, PsiKind, ScalarFunction, make_psi, psi_derivative, psi_inverse
from .quadrature import (QuadResult, gamma, integrate_adaptive, integrate_endpoint_singular)

__version__ = "0.1.0"
