"""Arakelov invariants of adelic R-divisors on the projective line over a
trivially valued field, computed in exact rational arithmetic."""

from .errors import InputError, P1Error, PreconditionError, ValidationError
from .polynomials import Poly, format_poly, format_rational, parse_poly
from .divisors import (
    INF, FormalRationalFunction, PointCluster, RDivisor, format_function, parse_cluster,
    parse_function, principal_divisor, refine_supports, solve_principal,
)
from .green import (
    AdelicDivisor, BranchProfile, GeometricTail, GreenFunction, TreePoint, add_adelic,
    add_principal, check_valid, dipping_tail, essential_minimum, eval_green, format_profile,
    height, is_effective, logmax_divisor, parse_profile, parse_tree_point, principal_adelic,
    projective_line_divisor, validate, with_tails,
)
from .mu import (
    DirichletCertificate, FailureReason, decide_dirichlet, decide_pseudoeffective,
    epsilon_dirichlet, mu_report, mu_tot, mu_x, profile_mu, verify_witness,
)
from .sections import (
    FiltrationTable, deg_plus, filtration, h0_dimension, is_big, lambda_max_asy,
    lambda_max_n, lambda_star, section_norm, volume, volume_exact,
)
from .dynamics import (
    EigenData, Endomorphism, canonical_green, canonical_height_checks, check_eigen,
    concave_criteria, pullback_adelic, pullback_divisor, pullback_function, pullback_green,
    pushforward_cluster,
)
from .finiteness import finiteness_probe, phi_sequence
from .problem import Problem, parse_problem, read_problem, serialize

__version__ = "0.1.0"
