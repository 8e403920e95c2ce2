"""
Ring Walk - Component Module Initialization
"""

from .spectrum_report import run_spectrum, run_pf_spectrum, run_unitary_baseline
from .detection_runs import run_pdet_series, run_pdet_sweep, run_pf_sweep, run_tau_curve
from .dark_analysis import run_dark_report, run_dark_count, run_dark_curves
from .optimization import (
    run_tau_star,
    run_optimize,
    run_tas_curve,
    run_size_budget,
    run_tau_opt_trend,
)

# Subcommand name -> component
SUBCOMMANDS = {
    'spectrum': run_spectrum,
    'pdet-series': run_pdet_series,
    'pdet-sweep': run_pdet_sweep,
    'pf-spectrum': run_pf_spectrum,
    'pf-sweep': run_pf_sweep,
    'dark-report': run_dark_report,
    'dark-count': run_dark_count,
    'dark-curves': run_dark_curves,
    'tau-star': run_tau_star,
    'optimize': run_optimize,
    'tas-curve': run_tas_curve,
    'tau-curve': run_tau_curve,
    'tau-opt-trend': run_tau_opt_trend,
    'size-budget': run_size_budget,
    'unitary-baseline': run_unitary_baseline,
}

__all__ = [
    'SUBCOMMANDS',
    'run_spectrum',
    'run_pf_spectrum',
    'run_unitary_baseline',
    'run_pdet_series',
    'run_pdet_sweep',
    'run_pf_sweep',
    'run_tau_curve',
    'run_dark_report',
    'run_dark_count',
    'run_dark_curves',
    'run_tau_star',
    'run_optimize',
    'run_tas_curve',
    'run_size_budget',
    'run_tau_opt_trend',
]
