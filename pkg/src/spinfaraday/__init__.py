"""Spin-dependent Faraday rotation of probe light in a high-finesse cavity.

A single spin-1/2 emitter couples one circular polarization component of a
weak probe to a cavity mode while the opposite component passes unaffected,
turning spin state into polarization rotation and ellipticity of the
transmitted light. The package provides:

- analytic steady-state transmittance and the count-based rotation
  estimator (``optics``)
- parameter derivation from cavity geometry (``params``)
- a Lindblad steady-state solver used as an independent oracle and for
  fluorescence lineshapes (``lindblad``)
- the back-action measurement model: Kraus operators, conditional spin
  populations, measurement reversal (``measurement``)
- Monte Carlo ensembles of falling atoms with real-time coincidence
  selection (``montecarlo``)
- design scans and the two-qubit feasibility estimate (``scans``)
- a CSV-producing command line, ``spinfaraday`` (``cli``)
"""

from .lindblad import (
    CutoffError,
    LindbladModel,
    Lineshape,
    SteadyState,
    curve_fwhm,
    fluorescence_lineshape,
    fluorescence_rate,
    hamiltonian,
    liouvillian,
    purcell_rate_formula,
    steady_state,
    transmittance_steady,
)
from .measurement import (
    ConditionalCurves,
    ConditionalResult,
    MeasurementError,
    MeasurementOperator,
    REFLECTED,
    SpinState,
    TRANSMITTED,
    apply_measurement,
    conditional_curves,
    conditional_population,
    detection_prob_down,
    detection_prob_up,
    fig5_curves,
    kraus,
    population_vs_detuning,
    pure_rotation_curves,
)
from .montecarlo import (
    CoincidenceConfig,
    MotionModel,
    SelectionError,
    Trajectory,
    average_rotation,
    average_transmittance,
    coincidence_gap_probability,
    coupling_matrix,
    coupling_series,
    export_trajectories_csv,
    pinned_trajectories,
    sample_selected_trajectories,
    selected_mean_coupling,
    threshold_trajectories,
)
from .optics import (
    AtomPosition,
    BALANCED_ANALYZER_OFFSET,
    InsufficientCountsError,
    PolarizationField,
    Transmittance,
    angle_from_counts,
    coupling_at,
    coupling_grid,
    polarization_azimuth,
    propagate,
    rotation_angle,
    rotation_curve,
    t_minus_value,
    transmittance,
)
from .params import (
    TWO_PI,
    CavityGeometry,
    ConfigError,
    DEFAULT_DETECTION,
    DEFAULT_GEOMETRY,
    DEFAULT_PARAMS,
    DetectionChain,
    GeometryError,
    SystemParams,
    build_settings,
    derive_g0,
    derive_kappa,
    derive_waist,
    finesse,
    load_config,
    params_for_geometry,
    parse_config_text,
    settings_to_flat,
)
from .scans import (
    CAVITY_EQUALS_ATOM,
    CnotReport,
    LosslessPoint,
    MaxRotation,
    PROBE_EQUALS_CAVITY,
    ScanResult,
    cnot_feasibility,
    default_length_grid,
    default_reflectivity_grid,
    lossless_rotation_point,
    max_rotation,
    scan_length,
    scan_reflectivity,
)

__version__ = "1.0.0"

__all__ = [
    "AtomPosition",
    "BALANCED_ANALYZER_OFFSET",
    "CAVITY_EQUALS_ATOM",
    "CavityGeometry",
    "CnotReport",
    "CoincidenceConfig",
    "ConditionalCurves",
    "ConditionalResult",
    "ConfigError",
    "CutoffError",
    "DEFAULT_DETECTION",
    "DEFAULT_GEOMETRY",
    "DEFAULT_PARAMS",
    "DetectionChain",
    "GeometryError",
    "InsufficientCountsError",
    "LindbladModel",
    "Lineshape",
    "LosslessPoint",
    "MaxRotation",
    "MeasurementError",
    "MeasurementOperator",
    "MotionModel",
    "PROBE_EQUALS_CAVITY",
    "PolarizationField",
    "REFLECTED",
    "ScanResult",
    "SelectionError",
    "SpinState",
    "SteadyState",
    "SystemParams",
    "TWO_PI",
    "TRANSMITTED",
    "Trajectory",
    "Transmittance",
    "angle_from_counts",
    "apply_measurement",
    "average_rotation",
    "average_transmittance",
    "build_settings",
    "cnot_feasibility",
    "coincidence_gap_probability",
    "conditional_curves",
    "conditional_population",
    "coupling_at",
    "coupling_grid",
    "coupling_matrix",
    "coupling_series",
    "curve_fwhm",
    "default_length_grid",
    "default_reflectivity_grid",
    "derive_g0",
    "derive_kappa",
    "derive_waist",
    "detection_prob_down",
    "detection_prob_up",
    "export_trajectories_csv",
    "fig5_curves",
    "finesse",
    "fluorescence_lineshape",
    "fluorescence_rate",
    "hamiltonian",
    "kraus",
    "liouvillian",
    "lossless_rotation_point",
    "load_config",
    "max_rotation",
    "params_for_geometry",
    "parse_config_text",
    "pinned_trajectories",
    "polarization_azimuth",
    "population_vs_detuning",
    "propagate",
    "purcell_rate_formula",
    "pure_rotation_curves",
    "rotation_angle",
    "rotation_curve",
    "sample_selected_trajectories",
    "scan_length",
    "scan_reflectivity",
    "selected_mean_coupling",
    "settings_to_flat",
    "steady_state",
    "t_minus_value",
    "threshold_trajectories",
    "transmittance",
    "transmittance_steady",
]
