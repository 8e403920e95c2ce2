"""
Dark State Analysis Module
Dark bases, dark-state counts and dark-state curves in the (phi, tau) plane
"""

import logging
import math

import numpy as np

from models.dark_states import dark_report, dark_state_count_in_window, dark_state_curves
from models.optimizer import default_phi_grid

from ..utils.config import ExperimentConfig
from ..utils.helpers import load_defaults
from ..utils.tables import ResultTable

logger = logging.getLogger(__name__)

NAN = float("nan")


def run_dark_report(config: ExperimentConfig) -> ResultTable:
    """
    Orthonormal dark basis with per-state weight on |0>

    Two summary rows close the table: initial_overlap and pdet_infinity,
    with the value in overlap_sq.
    """
    report = dark_report(config.walk_config())
    rows = [
        (
            state.origin,
            state.m,
            state.n,
            NAN if state.k is None else state.k,
            float(abs(state.vector[0]) ** 2),
            state.pf_eigenvalue.real,
            state.pf_eigenvalue.imag,
        )
        for state in report.dark_basis
    ]
    rows.append(("initial_overlap", NAN, NAN, NAN, report.initial_overlap, NAN, NAN))
    rows.append(("pdet_infinity", NAN, NAN, NAN, report.pdet_infinity, NAN, NAN))
    return ResultTable(
        columns=["origin", "m", "n", "k", "overlap_sq", "pf_eigval_re", "pf_eigval_im"],
        rows=rows,
    )


def run_dark_count(config: ExperimentConfig) -> ResultTable:
    """
    Number of phase-matched dark states in a phase window along tau

    The window is the span of the phi grid, or [-pi/N, pi/N].
    """
    config.require("n")
    grids = load_defaults()["grids"]
    if config.phi_grid is not None:
        lo, hi = float(config.phi_grid.min()), float(config.phi_grid.max())
    else:
        lo, hi = -math.pi / config.N, math.pi / config.N
    taus = config.tau_grid
    if taus is None:
        taus = np.linspace(
            grids["dark_count_tau_min"], grids["dark_count_tau_max"], grids["dark_count_tau_points"]
        )
    rows = [
        (float(tau), dark_state_count_in_window(config.N, lo, hi, float(tau), config.k_max))
        for tau in taus
    ]
    return ResultTable(columns=["tau", "count"], rows=rows)


def run_dark_curves(config: ExperimentConfig) -> ResultTable:
    """Points of the dark-state curves tau(phi); tau caps the curves when given"""
    config.require("n")
    defaults = load_defaults()
    phis = config.phi_grid
    if phis is None:
        phis = default_phi_grid(config.N, defaults["grids"]["phi_points"])
    tau_max = config.tau if config.tau is not None else defaults["dark_curves"]["tau_max"]
    k_max = config.k_max if config.k_max is not None else defaults["dark_curves"]["k_max"]
    points = dark_state_curves(config.N, phis, tau_max, k_max)
    logger.info("%d dark-curve points up to tau=%s", len(points), tau_max)
    return ResultTable(columns=["m", "n", "k", "phi", "tau"], rows=[tuple(p) for p in points])
