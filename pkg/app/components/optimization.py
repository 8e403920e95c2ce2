"""
Optimization Module
Threshold, optimal protocol and the size, budget and period trends
"""

import logging

import numpy as np

from models.optimizer import (
    default_tau_grid,
    optimal_period_trend,
    optimize,
    pdet_vs_size_and_budget,
    reference_protocol,
    summarize_optimum,
    tas_vs_tau,
    tau_star,
)

from ..utils.config import ExperimentConfig
from ..utils.helpers import load_defaults
from ..utils.tables import ResultTable

logger = logging.getLogger(__name__)


def _period_grid(config: ExperimentConfig) -> np.ndarray:
    if config.tau_grid is not None:
        return config.tau_grid
    grids = load_defaults()["grids"]
    return default_tau_grid(grids["tau_points"], grids["tau_min"], grids["tau_max"])


def run_tau_star(config: ExperimentConfig) -> ResultTable:
    """Analytic and empirical tau* at one phase or along the phi grid"""
    config.require("n", "delta")
    if config.phi_grid is not None:
        phis = config.phi_grid
    else:
        config.require("phi")
        phis = [config.phi]
    rows = []
    for phi in phis:
        config.walk_config(phi=float(phi), tau=1.0)
        result = tau_star(config.N, float(phi), config.delta)
        rows.append((result.phi, result.analytic, result.empirical, int(result.disagreement)))
    return ResultTable(
        columns=["phi", "tau_star_analytic", "tau_star_empirical", "disagreement_flag"],
        rows=rows,
    )


def run_optimize(config: ExperimentConfig) -> ResultTable:
    """Optimal (phi, tau) under the budget with tau*, tau_PF and the mirror solution"""
    config.require("n", "delta")
    config.walk_config(phi=0.0, tau=min(1.0, config.total_time))
    optimum = optimize(
        config.N,
        config.delta,
        config.total_time,
        phi_values=config.phi_grid,
        tau_values=config.tau_grid,
        workers=config.workers,
    )
    summary = summarize_optimum(optimum)
    return ResultTable(columns=list(summary), rows=[list(summary.values())])


def run_tas_curve(config: ExperimentConfig) -> ResultTable:
    """
    Gap and t_as along tau

    Target and phase default to the reference protocol of the ring size.
    """
    config.require("n")
    delta, phi = reference_protocol(config.N)
    if config.delta is not None:
        delta = config.delta
    if config.phi is not None:
        phi = config.phi
    taus = config.tau_grid
    if taus is None:
        grids = load_defaults()["grids"]
        taus = np.linspace(grids["tas_tau_min"], grids["tas_tau_max"], grids["tas_tau_points"])
    rows = [tuple(point) for point in tas_vs_tau(config.N, phi, delta, taus)]
    return ResultTable(columns=["tau", "gap", "t_as"], rows=rows)


def run_size_budget(config: ExperimentConfig) -> ResultTable:
    """
    P_det over ring sizes and budgets at each size's reference protocol

    The saturation budget of every size is annotated in the header.
    """
    figures = load_defaults()["figures"]
    sizes = config.n_values or figures["n_values"]
    budgets = config.t_values or figures["t_values"]
    table = pdet_vs_size_and_budget(sizes, budgets, config.tau_grid)
    rows = []
    provenance = {}
    for i, N in enumerate(table.N_values):
        for j, T in enumerate(table.T_values):
            rows.append((N, T, table.tau_values[i], table.phi_values[i], float(table.pdet[i, j])))
        provenance[f"saturation N={N}"] = (
            f"T={table.saturation_T[i]:.17g} pdet_infinity={table.pdet_infinity[i]:.17g}"
        )
    return ResultTable(
        columns=["N", "T", "tau_opt", "phi_opt", "pdet"],
        rows=rows,
        provenance=provenance,
    )


def run_tau_opt_trend(config: ExperimentConfig) -> ResultTable:
    """Finite-budget optimal period next to tau_PF over sizes and budgets"""
    figures = load_defaults()["figures"]
    sizes = config.n_values or figures["n_values"]
    budgets = config.t_values or figures["t_values"]
    points = optimal_period_trend(sizes, budgets, _period_grid(config))
    return ResultTable(columns=["N", "T", "tau_opt", "tau_pf"], rows=[tuple(p) for p in points])
