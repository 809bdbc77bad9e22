"""Lightlike surfaces in three-dimensional Minkowski space.

Generation of non-conical lightlike surfaces from a profile function,
frame-based invariants, and a plane / cone / non-conical classifier.
"""

from .classify import (
    InvariantReport,
    Thresholds,
    Verdict,
    check_ruled,
    compute_invariants,
    connection_coefficient,
    cone_vertex,
    induced_metric,
    tangent_frame_0adapted,
    verify_structure_equations,
)
from .frames import (
    AdaptedFrame,
    FrameLevel,
    GaugeParameters,
    complete_null_frame,
    frame_decompose,
    frame_reconstruct,
    gauge_transform,
    standard_frame,
    verify_frame,
)
from .minkowski import CausalClass, Isometry, apply_isometry, causal_class, inner, mvec
from .ode import (
    build_G0_via_SL,
    integrate_frame_coefficients,
    parse_profile,
    solve_sturm_liouville,
)
from .surface import (
    frame_field,
    make_cone,
    make_plane,
    parametrize_nonconical,
    reparametrize,
    transform,
)

__all__ = [name for name in dir() if not name.startswith("_")]
