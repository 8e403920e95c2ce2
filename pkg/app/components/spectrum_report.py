"""
Spectrum Report Module
Energy levels, Perron-Frobenius eigenvalues and the unmonitored baseline
"""

import logging

import numpy as np

from models.perron_frobenius import pf_spectrum, survival_spectral_estimate
from models.ring_model import analytic_spectrum, unitary_transfer_map
from models.optimizer import default_phi_grid

from ..utils.config import ExperimentConfig
from ..utils.helpers import load_defaults
from ..utils.tables import ResultTable

logger = logging.getLogger(__name__)


def run_spectrum(config: ExperimentConfig) -> ResultTable:
    """Energy levels lambda_j of the ring"""
    config.require("n", "phi")
    spectrum = analytic_spectrum(config.N, config.phi)
    rows = [(j, float(value)) for j, value in enumerate(spectrum.eigenvalues)]
    return ResultTable(columns=["j", "lambda_j"], rows=rows)


def run_pf_spectrum(config: ExperimentConfig) -> ResultTable:
    """
    Eigenvalues of the Perron-Frobenius operator with their overlaps

    The header carries the moduli, the gap and the spectral survival check
    at the budget.
    """
    walk = config.walk_config()
    spectrum = pf_spectrum(walk)
    rows = [
        (j, float(mu.real), float(mu.imag), float(abs(mu)), float(overlap))
        for j, (mu, overlap) in enumerate(zip(spectrum.eigenvalues, spectrum.overlaps))
    ]
    estimate = survival_spectral_estimate(walk, walk.attempts)
    provenance = {
        "mu_pf_abs": f"{spectrum.leading_modulus:.17g}",
        "mu_sub_abs": f"{spectrum.subleading_modulus:.17g}",
        "gap": f"{spectrum.gap:.17g}",
        "t_as": f"{spectrum.t_asymptotic:.17g}",
        "dark_overlap": f"{spectrum.dark_overlap:.17g}",
        "unit_modes": str(spectrum.unit_count),
        "null_modes": str(spectrum.null_count),
        "survival_estimate": (
            f"n={estimate.n} spectral={estimate.estimate:.17g} "
            f"iterated={estimate.iterated:.17g} deviation={estimate.deviation:.3g}"
        ),
    }
    return ResultTable(
        columns=["j", "mu_re", "mu_im", "mu_abs", "overlap_sq"],
        rows=rows,
        provenance=provenance,
    )


def run_unitary_baseline(config: ExperimentConfig) -> ResultTable:
    """
    Unmonitored transfer probability |<delta|U(t)|0>|^2 on a (phi, t) grid

    The time axis is read from the tau grid when one is given.
    """
    config.require("n", "delta")
    defaults = load_defaults()["grids"]
    if config.phi_grid is not None:
        phis = config.phi_grid
    elif config.phi is not None:
        phis = np.array([config.phi])
    else:
        phis = default_phi_grid(config.N, defaults["phi_points"])
    if config.tau_grid is not None:
        times = config.tau_grid
    else:
        times = np.linspace(0.0, defaults["baseline_t_max"], defaults["baseline_t_points"])
    for phi in (phis.min(), phis.max()):
        config.walk_config(phi=float(phi), tau=1.0)

    probabilities = unitary_transfer_map(config.N, config.delta, phis, times)
    rows = [
        (float(phi), float(t), float(probabilities[i, j]))
        for i, phi in enumerate(phis)
        for j, t in enumerate(times)
    ]
    return ResultTable(columns=["phi", "t", "p_delta"], rows=rows)
