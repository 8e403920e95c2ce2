"""
Dark States
Analytic dark states of the monitored ring and the dark-subspace overlap

A dark state is orthogonal to the target and stays orthogonal under the
monitored evolution. On the ring they are built from pairs of energy
eigenstates that are either degenerate or phase matched at the detection
period, lambda_m tau = lambda_n tau (mod 2 pi).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import DegenerateDenominatorError, NotDarkError
from .ring_model import (
    TOL_DEGENERATE,
    StateVector,
    WalkConfig,
    analytic_spectrum,
    level_energies,
    propagator,
)

logger = logging.getLogger(__name__)

DARK_TOL = 1e-10
TAU_MATCH_TOL = 1e-9
DENOMINATOR_TOL = 1e-12
# Residual norm below which a candidate adds nothing to the dark span
SPAN_TOL = 1e-8

DEGENERATE_PAIR = "degenerate-pair"
PHASE_MATCHED = "phase-matched"


@dataclass(frozen=True)
class DarkState:
    """
    Unit-norm dark state with its construction

    origin is DEGENERATE_PAIR or PHASE_MATCHED; k is set only for
    phase-matched states. pf_eigenvalue is exp(-i lambda_m tau).
    """

    vector: StateVector
    origin: str
    m: int
    n: int
    k: Optional[int]
    pf_eigenvalue: complex


@dataclass(frozen=True)
class DarkReport:
    """Orthonormal dark basis at one configuration and what it implies for |0>"""

    config: WalkConfig
    dark_basis: List[DarkState]
    initial_overlap: float
    pdet_infinity: float

    @property
    def fully_bright(self) -> bool:
        return not self.dark_basis


class DarkCurvePoint(NamedTuple):
    m: int
    n: int
    k: int
    phi: float
    tau: float


def degenerate_pairs(N: int, phi: float, tol: float = TOL_DEGENERATE) -> List[Tuple[int, int]]:
    """
    Index pairs of degenerate energy levels

    Args:
        N: Number of sites
        phi: Chiral phase
        tol: Tolerance on |lambda_m - lambda_n|

    Returns:
        Sorted list of (m, n) with m < n
    """
    energies = level_energies(N, phi)
    close = np.abs(energies[:, None] - energies[None, :]) < tol
    m_idx, n_idx = np.nonzero(np.triu(close, k=1))
    return [(int(m), int(n)) for m, n in zip(m_idx, n_idx)]


def _pair_vector(N: int, phi: float, m: int, n: int, delta: int) -> StateVector:
    basis = analytic_spectrum(N, float(phi)).eigenvectors
    return math.sqrt(N / 2) * (basis[delta, n] * basis[:, m] - basis[delta, m] * basis[:, n])


def dark_state_from_pair(
    N: int,
    phi: float,
    m: int,
    n: int,
    delta: int,
    tau: float,
) -> DarkState:
    """
    Dark state built from the energy eigenstates m and n

    gamma = sqrt(N/2) (<delta|lambda_n> |lambda_m> - <delta|lambda_m> |lambda_n>)
    is unit norm and orthogonal to the target for every pair; it is dark when
    the two levels are degenerate or phase matched within 1e-9 of tau.

    Args:
        N: Number of sites
        phi: Chiral phase
        m: First level index
        n: Second level index
        delta: Target site
        tau: Detection period

    Returns:
        DarkState with its origin and unit-modulus PF eigenvalue

    Raises:
        NotDarkError: if the state fails the dark-state checks at tau
    """
    if m == n:
        raise ValueError("dark states need two distinct levels")
    config = WalkConfig(N=N, delta=delta, phi=phi, tau=tau)
    energies = analytic_spectrum(N, float(phi)).eigenvalues
    vector = _pair_vector(N, phi, m, n, delta)
    degenerate = abs(energies[m] - energies[n]) < config.tol_degenerate
    k = None if degenerate else int(round((energies[m] - energies[n]) * tau / (2 * math.pi)))

    # A period within TAU_MATCH_TOL of a matching period is checked at the exact one
    check_tau = tau
    if k:
        matched_tau = phase_matching_tau(N, phi, m, n, k)
        if abs(matched_tau - tau) < TAU_MATCH_TOL:
            check_tau = matched_tau
    eigenvalue = complex(np.exp(-1j * energies[m] * check_tau))

    evolved = propagator(config, check_tau) @ vector
    leak = max(abs(vector[delta]), abs(evolved[delta]))
    evolved[delta] = 0.0
    residual = float(np.linalg.norm(evolved - eigenvalue * vector))
    if residual > DARK_TOL or leak > DARK_TOL:
        raise NotDarkError(
            f"levels ({m}, {n}) give no dark state at N={N}, phi={phi}, tau={tau}: "
            f"residual {residual:.3g}"
        )

    if degenerate:
        return DarkState(vector, DEGENERATE_PAIR, m, n, None, eigenvalue)
    return DarkState(vector, PHASE_MATCHED, m, n, k, eigenvalue)


def phase_matching_tau(N: int, phi: float, m: int, n: int, k: int) -> float:
    """
    Detection period at which levels m and n are phase matched

    tau = k pi / (2 sin(pi (m - n) / N) sin(phi - pi (m + n) / N))

    The result is odd in k; only positive values are physical.

    Raises:
        DegenerateDenominatorError: if either sine vanishes
    """
    if k == 0:
        raise ValueError("phase matching needs k != 0")
    s_diff = math.sin(math.pi * (m - n) / N)
    s_sum = math.sin(phi - math.pi * (m + n) / N)
    if abs(s_diff) < DENOMINATOR_TOL or abs(s_sum) < DENOMINATOR_TOL:
        raise DegenerateDenominatorError(
            f"no phase-matching period for levels ({m}, {n}) at N={N}, phi={phi}"
        )
    return k * math.pi / (2.0 * s_diff * s_sum)


def phase_matched_pairs(config: WalkConfig) -> List[Tuple[int, int, int]]:
    """
    Nondegenerate level pairs phase matched at config.tau

    Returns:
        List of (m, n, k) with m < n and |tau(m, n, k) - config.tau| < 1e-9
    """
    energies = level_energies(config.N, config.phi)
    matched = []
    for m in range(config.N):
        for n in range(m + 1, config.N):
            split = energies[m] - energies[n]
            if abs(split) < config.tol_degenerate:
                continue
            k = int(round(split * config.tau / (2 * math.pi)))
            if k == 0:
                continue
            tau = phase_matching_tau(config.N, config.phi, m, n, k)
            if abs(tau - config.tau) < TAU_MATCH_TOL:
                matched.append((m, n, k))
    return matched


def _orthonormalize(states: List[DarkState]) -> List[DarkState]:
    """Modified Gram-Schmidt with one reorthogonalisation pass; dependent states are dropped"""
    basis: List[DarkState] = []
    for state in states:
        v = state.vector.astype(complex)
        for _ in range(2):
            for b in basis:
                v = v - np.vdot(b.vector, v) * b.vector
        norm = np.linalg.norm(v)
        if norm < SPAN_TOL:
            continue
        basis.append(DarkState(v / norm, state.origin, state.m, state.n, state.k, state.pf_eigenvalue))
    return basis


def dark_report(config: WalkConfig) -> DarkReport:
    """
    All dark states at (phi, tau) and the dark weight of the initial state

    Args:
        config: Walk configuration

    Returns:
        DarkReport; an empty basis means the Hilbert space is fully bright
    """
    candidates = []
    pairs = [(m, n) for m, n in degenerate_pairs(config.N, config.phi, config.tol_degenerate)]
    pairs += [(m, n) for m, n, _ in phase_matched_pairs(config)]
    for m, n in pairs:
        try:
            candidates.append(
                dark_state_from_pair(config.N, config.phi, m, n, config.delta, config.tau)
            )
        except NotDarkError as e:
            logger.warning("skipping near-dark pair: %s", e)

    basis = _orthonormalize(candidates)
    overlap = float(sum(abs(state.vector[0]) ** 2 for state in basis))
    overlap = min(overlap, 1.0)
    logger.debug(
        "dark report %s: %d candidates, rank %d, overlap %.12g",
        config, len(candidates), len(basis), overlap,
    )
    return DarkReport(
        config=config,
        dark_basis=basis,
        initial_overlap=overlap,
        pdet_infinity=1.0 - overlap,
    )


def _window_roots(c: float, r: float, lo: float, hi: float) -> List[float]:
    """Solutions of sin(phi - c) = r with phi in [lo, hi]"""
    base = math.asin(r)
    roots = []
    for offset in (base, math.pi - base):
        first = math.ceil((lo - c - offset) / (2 * math.pi))
        last = math.floor((hi - c - offset) / (2 * math.pi))
        for ell in range(first, last + 1):
            phi = c + offset + 2 * math.pi * ell
            if lo <= phi <= hi and all(abs(phi - x) > DENOMINATOR_TOL for x in roots):
                roots.append(phi)
    return roots


def default_k_max(tau: float) -> int:
    """Largest |k| worth scanning; 2 tau bounds 2 tau |sin sin|"""
    return int(math.ceil(2 * tau / math.pi)) + 1


def dark_state_count_in_window(
    N: int,
    phi_lo: float,
    phi_hi: float,
    tau: float,
    k_max: Optional[int] = None,
) -> int:
    """
    Number of phase-matching solutions (m, n, k, phi) with phi in a window

    Args:
        N: Number of sites
        phi_lo: Lower end of the phase window
        phi_hi: Upper end of the phase window
        tau: Detection period
        k_max: Largest |k| considered (defaults to ceil(2 tau / pi) + 1)

    Returns:
        Count of solutions over m < n and 1 <= |k| <= k_max
    """
    if not phi_lo < phi_hi:
        raise ValueError(f"empty phase window [{phi_lo}, {phi_hi}]")
    if k_max is None:
        k_max = default_k_max(tau)
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    count = 0
    for m in range(N):
        for n in range(m + 1, N):
            amplitude = math.sin(math.pi * (m - n) / N)
            centre = math.pi * (m + n) / N
            for k in range(-k_max, k_max + 1):
                if k == 0:
                    continue
                r = k * math.pi / (2.0 * tau * amplitude)
                if abs(r) <= 1.0:
                    count += len(_window_roots(centre, r, phi_lo, phi_hi))
    logger.debug("dark-state count N=%d tau=%g k_max=%d: %d", N, tau, k_max, count)
    return count


def dark_state_curves(
    N: int,
    phi_values,
    tau_max: float,
    k_max: int,
) -> List[DarkCurvePoint]:
    """
    Points of the dark-state curves tau(phi) for every level pair and k

    Args:
        N: Number of sites
        phi_values: Phases at which the curves are sampled
        tau_max: Largest period kept
        k_max: Largest |k| considered

    Returns:
        DarkCurvePoint list with 0 < tau <= tau_max, ordered by phi, then (m, n, k)
    """
    m_idx, n_idx = np.triu_indices(N, k=1)
    s_diff = np.sin(np.pi * (m_idx - n_idx) / N)
    ks = np.array([k for k in range(-k_max, k_max + 1) if k != 0])
    points = []
    for phi in np.asarray(phi_values, dtype=float):
        s_sum = np.sin(phi - np.pi * (m_idx + n_idx) / N)
        denominator = 2.0 * s_diff * s_sum
        valid = np.abs(s_sum) >= DENOMINATOR_TOL
        with np.errstate(divide="ignore"):
            taus = ks[None, :] * np.pi / denominator[:, None]
        keep = valid[:, None] & (taus > 0) & (taus <= tau_max)
        for p, q in zip(*np.nonzero(keep)):
            points.append(
                DarkCurvePoint(int(m_idx[p]), int(n_idx[p]), int(ks[q]), float(phi), float(taus[p, q]))
            )
    return points
