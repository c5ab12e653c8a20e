"""Finite-difference verification lab for 4-dimensional shrinking Ricci soliton identities."""
from .curvature import (
    CurvaturePackage,
    christoffel,
    cotton,
    covariant_derivative,
    curvature_package,
    div_weyl,
)
from .errors import (
    ConfigurationError,
    DomainError,
    EigenGapError,
    FrameDiscontinuityError,
    HermitianViolationError,
    InvalidMetricError,
    PreconditionError,
    SolitonLabError,
)
from .fields import (
    Box,
    DiffConfig,
    TensorField,
    partial_derivative,
    sample_points,
    second_partial,
)
from .forms import (
    FormComponents,
    FramePack,
    build_frames_gram_schmidt,
    build_frames_j_adapted,
    exterior_derivative,
    hodge_star,
    two_form_inner,
    wedge_1_2,
    wedge_1_3,
)
from .hermitian import (
    case2_system_residual,
    codifferential_1form,
    conformal_scalar_curvature,
    connection_forms,
    div_wplus_expansion_residual,
    eigen_frame_field,
    hermitian_form,
    j_adapted_frame_field,
    kappa_chain_residuals,
    lee_connection_claim_residual,
    lee_form,
    nabla_wplus_expansion_residual,
    wplus_eigenstructure_check,
)
from .soliton import (
    case1_system_residual,
    cotton_soliton_form_residual,
    cplus_contraction_identity_residual,
    grad_scalar_identity_residual,
    main_identity_lhs,
    soliton_residual,
    trace_free_ricci,
)
from .suites import RunConfig, VerificationReport, emit_report, run_suite
from .zoo import GeometrySpec, get_geometry, list_geometries, validate_geometry

__version__ = "0.1.0"

__all__ = [
    "Box",
    "build_frames_gram_schmidt",
    "build_frames_j_adapted",
    "case1_system_residual",
    "case2_system_residual",
    "christoffel",
    "codifferential_1form",
    "ConfigurationError",
    "conformal_scalar_curvature",
    "connection_forms",
    "cotton",
    "cotton_soliton_form_residual",
    "covariant_derivative",
    "cplus_contraction_identity_residual",
    "curvature_package",
    "CurvaturePackage",
    "DiffConfig",
    "div_weyl",
    "div_wplus_expansion_residual",
    "DomainError",
    "eigen_frame_field",
    "EigenGapError",
    "emit_report",
    "exterior_derivative",
    "FormComponents",
    "FrameDiscontinuityError",
    "FramePack",
    "GeometrySpec",
    "get_geometry",
    "grad_scalar_identity_residual",
    "hermitian_form",
    "HermitianViolationError",
    "hodge_star",
    "InvalidMetricError",
    "j_adapted_frame_field",
    "kappa_chain_residuals",
    "lee_connection_claim_residual",
    "lee_form",
    "list_geometries",
    "main_identity_lhs",
    "nabla_wplus_expansion_residual",
    "partial_derivative",
    "PreconditionError",
    "run_suite",
    "RunConfig",
    "sample_points",
    "second_partial",
    "soliton_residual",
    "SolitonLabError",
    "TensorField",
    "trace_free_ricci",
    "two_form_inner",
    "validate_geometry",
    "VerificationReport",
    "wedge_1_2",
    "wedge_1_3",
    "wplus_eigenstructure_check",
]
