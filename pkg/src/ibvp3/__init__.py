"""Well-posedness classification of third-order two-point problems.

A problem ``q_t + a (-i d/dx)^3 q = 0`` on ``[0, 1]`` with ``a = +i``
or ``a = -i`` and three non-Robin boundary conditions is reduced to a
canonical form of its characteristic determinant. The zeros of that
determinant are then located and tested against the conditioning and
zero-location criteria.
"""
from .chardet import (
    OMEGA,
    CanonicalForm,
    PseudoPeriodicParams,
    bracket_eval,
    canonical_form,
    fourth_order_beta,
    fourth_order_pseudoperiodic_illposed,
    pseudo_periodic_params,
)
from .exceptions import (
    BoundaryTieWarning,
    MissingZeroWarning,
    MultipleZeroWarning,
    NumericalError,
    RankError,
    RobinConditionError,
    SpecError,
    UnsupportedCouplingError,
)
from .problem import MINUS_I, PLUS_I, BoundaryRow, Direction, ProblemSpec, parse_spec, render_spec
from .series import GrowthProfile, divergence_check, evaluate_truncated, growth_profile
from .wellposed import (
    ClassLabel,
    Verdict,
    audit_conditioning,
    classify,
    sector_growth_audit,
    verdict,
    zero_bound_check,
)
from .zeros import Box, ZeroRecord, asymptotic_zero, find_zeros, validate_asymptotics, winding_number, zero_table

__version__ = "0.1.0"
