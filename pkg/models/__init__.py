"""
Ring Walk - Computation Module Initialization
"""

from .errors import (
    BudgetError,
    ConfigError,
    DecompositionError,
    DegenerateDenominatorError,
    NotDarkError,
    RingWalkError,
)
from .ring_model import (
    WalkConfig,
    Spectrum,
    analytic_spectrum,
    build_hamiltonian,
    propagator,
    translation_matrix,
    unitary_transfer_map,
    unitary_transfer_probability,
)
from .monitored_dynamics import (
    DetectionRecord,
    detection_probability_at_budget,
    detection_probability_batch,
    first_detection_series,
    mirror_config,
)
from .perron_frobenius import (
    PFSpectrum,
    SurvivalEstimate,
    asymptotic_scale,
    build_pf_operator,
    pf_moduli_batch,
    pf_spectrum,
    survival_spectral_estimate,
)
from .dark_states import (
    DarkReport,
    DarkState,
    dark_report,
    dark_state_count_in_window,
    dark_state_curves,
    dark_state_from_pair,
    degenerate_pairs,
    phase_matched_pairs,
    phase_matching_tau,
)
from .optimizer import (
    Optimum,
    SweepGrid,
    TauStar,
    optimal_period_trend,
    optimize,
    pdet_vs_size_and_budget,
    pdet_vs_tau,
    sweep,
    tas_vs_tau,
    tau_star,
)

__all__ = [
    'RingWalkError',
    'ConfigError',
    'BudgetError',
    'DecompositionError',
    'NotDarkError',
    'DegenerateDenominatorError',
    'WalkConfig',
    'Spectrum',
    'build_hamiltonian',
    'analytic_spectrum',
    'propagator',
    'translation_matrix',
    'unitary_transfer_probability',
    'unitary_transfer_map',
    'DetectionRecord',
    'first_detection_series',
    'detection_probability_at_budget',
    'detection_probability_batch',
    'mirror_config',
    'PFSpectrum',
    'SurvivalEstimate',
    'build_pf_operator',
    'pf_spectrum',
    'asymptotic_scale',
    'survival_spectral_estimate',
    'pf_moduli_batch',
    'DarkState',
    'DarkReport',
    'degenerate_pairs',
    'dark_state_from_pair',
    'phase_matching_tau',
    'phase_matched_pairs',
    'dark_report',
    'dark_state_count_in_window',
    'dark_state_curves',
    'SweepGrid',
    'Optimum',
    'TauStar',
    'sweep',
    'tau_star',
    'optimize',
    'pdet_vs_size_and_budget',
    'tas_vs_tau',
    'pdet_vs_tau',
    'optimal_period_trend',
]
