"""Sharp uncertainty-principle constants for solenoidal vector fields on R^N.

Closed-form constants, the one-dimensional weighted reduction with its
Kummer-function minimiser, a Galerkin certificate from above, and direct
checks on the explicit extremal fields.
"""
from .params import (
    DomainError, GeneralizedParams, ProblemParams, best_constant_curlfree,
    best_constant_poloidal, best_constant_solenoidal, best_constant_toroidal,
    best_constant_unconstrained, constants_row,
)
from .special import ExtremalProfile, KummerSpec, extremal_profile, kummer_1f1, tail_exponent
from .functionals import RadialProfile, r_quotients, identity_residual, balance_scaling
from .galerkin import assemble, converge_constant, min_eigenpair, solve
from .fields import PoloidalExtremal, ToroidalExtremal

__version__ = "0.1.0"
