"""Exact curvature computations for q-difference systems over Q(q)(x).

The main entry points are re-exported here; see the submodules for the
rest of the API.
"""

__version__ = "0.1.0"

from .confluence import (
    DifferentialSystem,
    convert_convention,
    deform_differential,
    deformation_curvature,
    differential_triviality_scan,
    specialization_containment_check,
    specialize_q1,
    specialize_root_of_unity,
)
from .curvature import (
    CurvatureClass,
    CurvatureReport,
    Verdict,
    classify,
    curvature,
    curvature_scan,
    g_criterion,
    iterative_structure_check,
    triviality_verdict,
)
from .errors import *  # noqa: F401,F403
from .expr import format_expr, parse_expr
from .galois import (
    Monomial,
    NotMonomial,
    admissible_primes,
    diagonal_group,
    generic_group,
    monomial_dynamics_test,
    rank1_differential_class,
    rank1_generic_group,
)
from .matrix import Matrix
from .qdiff import (
    QDiffSystem,
    direct_sum,
    dual,
    ext_power,
    g_matrices,
    gauge_transform,
    identity,
    integrability_check,
    iterate,
    iterates,
    prolong,
    q_binomial,
    q_factorial,
    q_number,
    sym_power,
    tensor,
)
from .solutions import (
    exponents_at_zero,
    gauge_to_constant,
    pade_reconstruct,
    rational_solution,
    series_solution,
    shear_normalize,
)
from .tower import QQ, RatFn, field, gauss_valuation, place, reduce_mod_place
