"""
Detection Runs Module
First-detection series and budgeted (phi, tau) landscapes
"""

import logging

import numpy as np

from models.monitored_dynamics import first_detection_series
from models.optimizer import SweepGrid, default_phi_grid, default_tau_grid, pdet_vs_tau, sweep
from models.perron_frobenius import survival_spectral_estimate

from ..utils.config import ExperimentConfig
from ..utils.helpers import load_defaults
from ..utils.tables import ResultTable

logger = logging.getLogger(__name__)


def run_pdet_series(config: ExperimentConfig) -> ResultTable:
    """
    F_m, P_det(m) and S(m) attempt by attempt

    Runs n_max attempts when given, otherwise floor(T / tau).
    """
    walk = config.walk_config()
    n = config.n_max if config.n_max is not None else walk.attempts
    record = first_detection_series(walk, n)
    rows = [
        (m, m * walk.tau, float(record.f_series[m - 1]), record.pdet(m), record.survival(m))
        for m in range(1, n + 1)
    ]
    estimate = survival_spectral_estimate(walk, n)
    provenance = {"spectral_survival": f"{estimate.estimate:.17g} (deviation {estimate.deviation:.3g})"}
    return ResultTable(columns=["m", "t", "F_m", "pdet", "survival"], rows=rows, provenance=provenance)


def _sweep_grid(config: ExperimentConfig) -> SweepGrid:
    config.require("n", "delta")
    defaults = load_defaults()["grids"]
    phis = config.phi_grid
    if phis is None:
        phis = default_phi_grid(config.N, defaults["phi_points"])
    taus = config.tau_grid
    if taus is None:
        taus = default_tau_grid(defaults["tau_points"], defaults["tau_min"], defaults["tau_max"])
    template = config.walk_config(phi=0.0, tau=float(taus[0]))
    return sweep(template, phis, taus, workers=config.workers)


def run_pdet_sweep(config: ExperimentConfig) -> ResultTable:
    """P_det at the budget over the (phi, tau) grid"""
    grid = _sweep_grid(config)
    attempts = grid.attempts
    rows = [
        (float(phi), float(tau), int(attempts[j]), float(grid.results[i, j]))
        for i, phi in enumerate(grid.phi_values)
        for j, tau in enumerate(grid.tau_values)
    ]
    return ResultTable(columns=["phi", "tau", "n_attempts", "pdet"], rows=rows)


def run_pf_sweep(config: ExperimentConfig) -> ResultTable:
    """Leading and subleading PF moduli, gap and t_as over the (phi, tau) grid"""
    grid = _sweep_grid(config)
    t_as = grid.t_asymptotic
    rows = [
        (
            float(phi),
            float(tau),
            float(grid.pf_moduli[i, j]),
            float(grid.subleading_moduli[i, j]),
            float(grid.gaps[i, j]),
            float(t_as[i, j]),
        )
        for i, phi in enumerate(grid.phi_values)
        for j, tau in enumerate(grid.tau_values)
    ]
    return ResultTable(
        columns=["phi", "tau", "mu_pf_abs", "mu_sub_abs", "gap", "t_as"],
        rows=rows,
    )


def run_tau_curve(config: ExperimentConfig) -> ResultTable:
    """P_det along tau at the reference protocol of each ring size"""
    defaults = load_defaults()
    sizes = config.n_values or ([config.N] if config.N is not None else defaults["figures"]["n_values"])
    taus = config.tau_grid
    if taus is None:
        grids = defaults["grids"]
        taus = default_tau_grid(grids["tau_points"], grids["tau_min"], grids["tau_max"])
    pdet = pdet_vs_tau(sizes, taus, config.total_time)
    rows = [
        (N, float(tau), float(pdet[i, j]))
        for i, N in enumerate(sizes)
        for j, tau in enumerate(np.asarray(taus))
    ]
    return ResultTable(columns=["N", "tau", "pdet"], rows=rows)
