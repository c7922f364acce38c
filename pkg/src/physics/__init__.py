"""
Physics package
"""
from .core import (
    BlochVector,
    CanonicalState,
    DensityMatrix,
    Frame,
    QubitState,
    bloch_from_canonical,
    bloch_from_density,
    bloch_from_qubit,
    canonical_from_bloch,
    density_from_bloch,
    density_from_qubit,
    perpendicular,
    qubit_from_canonical,
    wrap_angle,
)
from .fields import FieldSpec, FieldVariant, NonrotatingFieldParams, RotatingFieldParams, field_at, hamiltonian_value
from .qoracle import Propagator, RwaParams, propagate, propagator, rabi_frequency, rwa_solution, su2_rotation
from .exact import (
    FixedPointSet,
    RotatingFrameState,
    energy_linearity_check,
    exact_bloch_r,
    exact_canonical_r,
    exact_overlap_r,
    fixed_points,
    from_rotating_frame,
    rotating_hamiltonian,
    to_rotating_frame,
)
from .dynamics import IntegratorConfig, Trajectory, integrate_bloch, integrate_canonical, quantum_consistency
from .strobe import (
    ContourCurve,
    StroboscopicMap,
    classify_commensurability,
    contour_nr,
    contour_r,
    separatrix_r,
    stroboscopic_map,
)
from .analysis import (
    GammaFit,
    bessel_j0,
    expansion_terms,
    fit_gamma,
    gamma_prediction,
    high_freq_average,
    lyapunov_estimate,
    rwa_error,
    strong_coupling,
    weighted_average_series,
)
from .notgate import (
    NotDetection,
    NotRegime,
    detect_not,
    mean_not_time,
    nr_resonance_search,
    overlap_expression,
    predict_regimes,
)
from .geometry import frame_overlap_transfer, not_rule, precession_data, separatrix_precession_check
