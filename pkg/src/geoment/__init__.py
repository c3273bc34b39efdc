"""Geometric entanglement of pure symmetric multiqubit states.

A symmetric N-qubit state lives in an (N+1)-dimensional subspace and can be
written either as excitation-basis amplitudes or as N points on the Bloch
sphere.  This package converts between the two, computes the geometric
measure of entanglement by maximizing the overlap with coherent product
states, searches for maximally entangled configurations, builds classic
sphere arrangements and phase-structured families, fits their scaling laws,
and evaluates Bures quantumness.
"""

__version__ = "0.1.0"

from .arrangements import (
    Arrangement,
    arrangement_to_majorana,
    arrangements_match,
    coulomb_energy,
    covering_objective,
    import_arrangement,
    optimize_arrangement,
    tammes_objective,
)
from .entanglement import (
    CertificateReport,
    EntanglementResult,
    OptimizerConfig,
    average_overlap_quadrature,
    balanced_dicke_asymptotic,
    bures_from_entanglement,
    bures_quantumness,
    dicke_entanglement_closed_form,
    dicke_form_of_maximal_states,
    geometric_entanglement,
    search_max_entangled,
    symmetric_upper_bound,
    verify_extremal_certificates,
)
from .errors import ConvergenceError, DegenerateArrangementError, ParseError
from .families import (
    FamilySpec,
    build_state,
    coulomb_scaling_model,
    linear_phase_asymptotic,
    linear_phase_overlap_profile,
    quadratic_scaling_model,
    spiral_prediction,
)
from .scaling import ScalingDataset, ScalingFit, fit_scaling, residual_report
from .states import (
    BlochPoint,
    DickeVector,
    MajoranaSet,
    apply_global_rotation,
    coherent_overlap,
    coherent_state,
    dicke_basis_state,
    dicke_from_majorana,
    majorana_from_dicke,
)

__all__ = [
    "__version__",
    "Arrangement",
    "BlochPoint",
    "CertificateReport",
    "ConvergenceError",
    "DegenerateArrangementError",
    "DickeVector",
    "EntanglementResult",
    "FamilySpec",
    "MajoranaSet",
    "OptimizerConfig",
    "ParseError",
    "ScalingDataset",
    "ScalingFit",
    "apply_global_rotation",
    "arrangement_to_majorana",
    "arrangements_match",
    "average_overlap_quadrature",
    "balanced_dicke_asymptotic",
    "build_state",
    "bures_from_entanglement",
    "bures_quantumness",
    "coherent_overlap",
    "coherent_state",
    "coulomb_energy",
    "coulomb_scaling_model",
    "covering_objective",
    "dicke_basis_state",
    "dicke_entanglement_closed_form",
    "dicke_form_of_maximal_states",
    "dicke_from_majorana",
    "fit_scaling",
    "geometric_entanglement",
    "import_arrangement",
    "linear_phase_asymptotic",
    "linear_phase_overlap_profile",
    "majorana_from_dicke",
    "optimize_arrangement",
    "quadratic_scaling_model",
    "residual_report",
    "search_max_entangled",
    "spiral_prediction",
    "symmetric_upper_bound",
    "tammes_objective",
    "verify_extremal_certificates",
]
