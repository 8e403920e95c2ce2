"""
Monitored Dynamics
Stroboscopic detection protocol by direct state iteration

The surviving state is never renormalised: its squared norm after m
attempts is the survival probability S(m), and the squared amplitude
removed at the target on attempt m is the first-detection probability F_m.
This iteration is the reference every spectral estimate is checked against.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import BudgetError
from .ring_model import ComplexMatrix, StateVector, WalkConfig, propagator

logger = logging.getLogger(__name__)

MAX_DENSE_ATTEMPTS = 1_000_000


@dataclass(frozen=True)
class DetectionRecord:
    """
    Per-attempt detection statistics

    Index m - 1 of each series holds the value after attempt m.
    """

    config: WalkConfig
    attempts: int
    f_series: np.ndarray
    pdet_series: np.ndarray
    survival_series: np.ndarray

    def pdet(self, m: int) -> float:
        """Cumulative detection probability after m attempts (m >= 1)"""
        return float(self.pdet_series[m - 1])

    def survival(self, m: int) -> float:
        """Survival probability after m attempts (m >= 1)"""
        return float(self.survival_series[m - 1])


def initial_state(N: int) -> StateVector:
    """Walker localised on site 0"""
    state = np.zeros(N, dtype=complex)
    state[0] = 1.0
    return state


def monitored_step(
    state: StateVector,
    U: ComplexMatrix,
    delta: int,
) -> Tuple[float, StateVector]:
    """
    One evolve-then-measure cycle

    Args:
        state: Current (unnormalised) surviving state
        U: Propagator over one detection period
        delta: Target site

    Returns:
        Tuple of the detection probability of this attempt and the evolved
        state with its target amplitude removed
    """
    evolved = U @ state
    probability = float(abs(evolved[delta]) ** 2)
    evolved[delta] = 0.0
    return probability, evolved


def first_detection_series(config: WalkConfig, n_max: int) -> DetectionRecord:
    """
    First-detection probabilities F_m, P_det(m) and S(m) for m = 1..n_max

    Args:
        config: Walk configuration
        n_max: Number of detection attempts (1 <= n_max <= 10^6)

    Returns:
        DetectionRecord for the run
    """
    if n_max < 1:
        raise BudgetError(f"at least one detection attempt is required, got n_max={n_max}")
    if n_max > MAX_DENSE_ATTEMPTS:
        raise BudgetError(
            f"n_max={n_max} exceeds the dense storage limit {MAX_DENSE_ATTEMPTS}; run in chunks"
        )
    U = propagator(config, config.tau)
    state = initial_state(config.N)
    f_series = np.empty(n_max)
    survival = np.empty(n_max)
    for m in range(n_max):
        f_series[m], state = monitored_step(state, U, config.delta)
        survival[m] = float(np.vdot(state, state).real)
    logger.debug("first-detection series %s n_max=%d", config, n_max)
    return DetectionRecord(
        config=config,
        attempts=n_max,
        f_series=f_series,
        pdet_series=np.cumsum(f_series),
        survival_series=survival,
    )


def detection_probability_at_budget(config: WalkConfig) -> float:
    """
    Detection probability after n = floor(T / tau) attempts

    Raises:
        BudgetError: if the budget holds no attempt
    """
    n = config.attempts
    if n < 1:
        raise BudgetError(
            f"budget T={config.total_time} is shorter than the period tau={config.tau}"
        )
    return first_detection_series(config, n).pdet(n)


def detection_probability_batch(
    unitaries: np.ndarray,
    delta: int,
    n: int,
) -> np.ndarray:
    """
    P_det(n) for a stack of one-period propagators, iterated together

    Args:
        unitaries: Array of shape (B, N, N)
        delta: Target site
        n: Number of attempts

    Returns:
        Array of shape (B,) with the cumulative detection probabilities
    """
    if n < 1:
        raise BudgetError(f"at least one detection attempt is required, got n={n}")
    batch, N, _ = unitaries.shape
    states = np.zeros((batch, N, 1), dtype=complex)
    states[:, 0, 0] = 1.0
    pdet = np.zeros(batch)
    for _ in range(n):
        states = unitaries @ states
        pdet += np.abs(states[:, delta, 0]) ** 2
        states[:, delta, 0] = 0.0
    return pdet


def mirror_config(config: WalkConfig) -> WalkConfig:
    """
    Reflected configuration (phi, delta) -> (-phi, N - delta)

    Relabelling sites k -> -k mod N keeps site 0 fixed and reverses the
    chirality, so both configurations share every detection statistic.
    """
    return config.with_params(phi=-config.phi, delta=(config.N - config.delta) % config.N)
