"""Lattice point counts, successive minima and Betke-Henk-Wills checks for o-symmetric bodies."""

__version__ = "0.1.0"

from .bhw import BhwReport, box_closed_forms, check_bhw, phi_envelope, rhs_floor_product, scalar_floor_lemma
from .enumeration import (
    CountReport,
    boundary_gap_box,
    count_lattice_points,
    lattice_set_equal,
    list_lattice_points,
)
from .exceptions import AmbiguityError, BudgetExceededError, MarginError, SingularTransformError
from .geometry_core import (
    BoxBody,
    LpBallBody,
    MembershipClass,
    TransformedBody,
    classify_membership,
    gauge,
    operator_norm,
    reduce_to_standard_lattice,
    sample_rotation,
    support_bounding_box,
    transform_body,
)
from .lp import lp_bhw_comparison, lp_threshold_report, p0_exact, p0_paper, verify_lp_hull_stability
from .minima import MinimaResult, check_lipschitz_sandwich, integer_rank, successive_minima
from .stability import audit_radius_guarantee, rotation_sweep, stability_radius
