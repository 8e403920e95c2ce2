"""
Parameter Optimizer
Budgeted (phi, tau) sweeps, the dark-state threshold and the optimal protocol

Sweeps are split into one task per detection period: every phase of a
column is propagated as one batch, and columns are collected in order so
the output does not depend on the number of workers.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .dark_states import dark_report
from .errors import BudgetError, DecompositionError
from .monitored_dynamics import (
    detection_probability_at_budget,
    detection_probability_batch,
    first_detection_series,
)
from .perron_frobenius import pf_moduli_batch, pf_spectrum
from .ring_model import (
    DEFAULT_TOTAL_TIME,
    TOL_UNIT,
    WalkConfig,
    attempt_count,
    propagator_series,
    propagator_stack,
)

logger = logging.getLogger(__name__)

PHI_POINTS = 101
TAU_POINTS = 150
TAU_MIN = 0.02
TAU_MAX = 3.0

# Empirical threshold scan
ONSET_FRACTION = 0.1
ONSET_STEP = 1e-3
ONSET_TAU_MIN = 0.05
DISAGREEMENT_TOL = 0.05

SATURATION_FRACTION = 0.99
GOLDEN_XTOL = 1e-5


@dataclass(frozen=True)
class SweepGrid:
    """
    P_det and PF moduli on a (phi, tau) grid

    Row i belongs to phi_values[i] and column j to tau_values[j].
    gaps holds the spectral gap of the dynamically relevant modulus.
    """

    phi_values: np.ndarray
    tau_values: np.ndarray
    budget_T: float
    results: np.ndarray
    pf_moduli: np.ndarray
    subleading_moduli: np.ndarray
    gaps: np.ndarray

    @property
    def attempts(self) -> np.ndarray:
        return np.array([attempt_count(self.budget_T, tau) for tau in self.tau_values])

    @property
    def t_asymptotic(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(self.gaps >= TOL_UNIT, 1.0 / self.gaps, np.inf)


@dataclass(frozen=True)
class TauStar:
    """Dark-state threshold from the phase-matching condition and from the PF scan"""

    phi: float
    analytic: float
    empirical: float

    @property
    def disagreement(self) -> bool:
        """True when the two estimates differ by more than 0.05 (or the scan found none)"""
        return not abs(self.empirical - self.analytic) <= DISAGREEMENT_TOL


@dataclass(frozen=True)
class Optimum:
    """
    Best detection protocol under the budget

    For odd N the canonical solution has phi_opt >= 0; the mirror
    (mirror_phi, mirror_delta) reaches the same P_det.
    """

    N: int
    delta: int
    total_time: float
    phi_opt: float
    tau_opt: float
    tau_star: float
    tau_star_empirical: float
    tau_pf: float
    pdet_at_opt: float
    pdet_grid_max: float
    mirror_phi: float
    mirror_delta: int


@dataclass(frozen=True)
class SizeBudgetTable:
    """P_det at the reference protocol for several ring sizes and budgets"""

    N_values: List[int]
    T_values: List[float]
    tau_values: List[float]
    phi_values: List[float]
    pdet: np.ndarray
    pdet_infinity: List[float]
    saturation_T: List[float]


class TasPoint(NamedTuple):
    tau: float
    gap: float
    t_as: float


class TrendPoint(NamedTuple):
    N: int
    T: float
    tau_opt: float
    tau_pf: float


def default_phi_grid(N: int, points: int = PHI_POINTS) -> np.ndarray:
    """points phases spanning [-pi/N, pi/N]"""
    return np.linspace(-math.pi / N, math.pi / N, points)


def default_tau_grid(
    points: int = TAU_POINTS,
    lo: float = TAU_MIN,
    hi: float = TAU_MAX,
) -> np.ndarray:
    """points periods spanning [lo, hi]"""
    return np.linspace(lo, hi, points)


def reference_protocol(N: int) -> Tuple[int, float]:
    """
    Target and phase used for size comparisons

    Returns:
        (delta, phi): ((N - 1) / 2, pi / 2N) for odd N, (N / 2, 0) for even N
    """
    if N % 2:
        return (N - 1) // 2, math.pi / (2 * N)
    return N // 2, 0.0


def analytic_tau_star(N: int, phi) -> np.ndarray:
    """
    Smallest positive phase-matching period at each phase

    tau* = pi / (2 max |sin(pi (m - n) / N) sin(phi - pi (m + n) / N)|) over
    nondegenerate pairs m < n; k = +-1 always gives the minimum.
    """
    m_idx, n_idx = np.triu_indices(N, k=1)
    s_diff = np.sin(np.pi * (m_idx - n_idx) / N)
    phi = np.asarray(phi, dtype=float)
    s_sum = np.sin(phi[..., None] - np.pi * (m_idx + n_idx) / N)
    strength = np.where(np.abs(s_sum) < 1e-12, 0.0, np.abs(s_diff * s_sum))
    return np.pi / (2.0 * strength.max(axis=-1))


def _column_task(args) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P_det and PF moduli for every phase at one period"""
    N, delta, phi_values, tau, n, tol_unit = args
    unitaries = propagator_stack(N, phi_values, tau)
    pdet = detection_probability_batch(unitaries, delta, n)
    try:
        leading, subleading = pf_moduli_batch(unitaries, delta, tol_unit)
    except np.linalg.LinAlgError:
        for phi, U in zip(phi_values, unitaries):
            try:
                pf_moduli_batch(U[None], delta, tol_unit)
            except np.linalg.LinAlgError as e:
                config = WalkConfig(N=N, delta=delta, phi=float(phi), tau=tau)
                raise DecompositionError(
                    config, f"eigensolver failed: {e}", coordinates=(float(phi), tau)
                ) from e
        raise
    return pdet, leading, subleading


def _run_tasks(task, arguments: list, workers: int) -> list:
    if workers <= 1 or len(arguments) <= 1:
        return [task(args) for args in arguments]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, arguments))


def sweep(
    config_template: WalkConfig,
    phi_values: Optional[Sequence[float]] = None,
    tau_values: Optional[Sequence[float]] = None,
    workers: int = 1,
) -> SweepGrid:
    """
    Evaluate P_det(T) and the PF moduli on a (phi, tau) grid

    Args:
        config_template: Supplies N, delta, total_time and tolerances
        phi_values: Phases (defaults to 101 points over [-pi/N, pi/N])
        tau_values: Periods (defaults to 150 points over [0.02, 3.0])
        workers: Number of worker processes; 1 runs in process

    Returns:
        SweepGrid with results[i, j] = P_det at (phi_values[i], tau_values[j])

    Raises:
        ConfigError: if a grid phase is out of range
        BudgetError: if a grid period exceeds the budget
        DecompositionError: with the grid coordinates of a failed eigensolve
    """
    N, delta, T = config_template.N, config_template.delta, config_template.total_time
    phis = np.asarray(default_phi_grid(N) if phi_values is None else phi_values, dtype=float)
    taus = np.asarray(default_tau_grid() if tau_values is None else tau_values, dtype=float)
    if phis.size == 0 or taus.size == 0:
        raise ValueError("sweep grid must not be empty")
    for phi in (phis.min(), phis.max()):
        config_template.with_params(phi=float(phi))
    for tau in taus:
        config_template.with_params(tau=float(tau))
        if attempt_count(T, tau) < 1:
            raise BudgetError(f"grid period tau={tau} exceeds the budget T={T}")

    logger.info(
        "sweep N=%d delta=%d T=%g over %d x %d grid with %d worker(s)",
        N, delta, T, phis.size, taus.size, workers,
    )
    arguments = [
        (N, delta, phis, float(tau), attempt_count(T, tau), config_template.tol_unit)
        for tau in taus
    ]
    columns = _run_tasks(_column_task, arguments, workers)
    results = np.stack([c[0] for c in columns], axis=1)
    leading = np.stack([c[1] for c in columns], axis=1)
    subleading = np.stack([c[2] for c in columns], axis=1)

    gaps = np.maximum(1.0 - leading, 0.0)
    # Unit-modulus modes only matter when |0> overlaps them
    for i, j in zip(*np.nonzero(1.0 - leading < config_template.tol_unit)):
        config = config_template.with_params(phi=float(phis[i]), tau=float(taus[j]))
        gaps[i, j] = pf_spectrum(config).gap
    logger.info("sweep done, max P_det %.6f", float(results.max()))
    return SweepGrid(
        phi_values=phis,
        tau_values=taus,
        budget_T=T,
        results=results,
        pf_moduli=leading,
        subleading_moduli=subleading,
        gaps=gaps,
    )


def _onset(tau_values: np.ndarray, moduli: np.ndarray, fraction: float) -> float:
    """
    First local maximum whose distance to the unit circle has shrunk below
    fraction times the largest distance seen at smaller tau
    """
    distance = 1.0 - moduli
    deepest = np.maximum.accumulate(distance)
    for i in range(1, len(moduli) - 1):
        peak = moduli[i] >= moduli[i - 1] and moduli[i] >= moduli[i + 1]
        if peak and distance[i] < fraction * deepest[i]:
            return float(tau_values[i])
    return float("nan")


def empirical_tau_star(
    N: int,
    phi: float,
    delta: int,
    tau_max: Optional[float] = None,
    step: float = ONSET_STEP,
    fraction: float = ONSET_FRACTION,
) -> float:
    """
    Threshold read off the PF spectrum

    Scans the subleading modulus along tau and returns the first sharp
    peak that climbs back towards the unit circle after the smooth decay;
    NaN if none.
    """
    if tau_max is None:
        tau_max = max(TAU_MAX, float(analytic_tau_star(N, phi)) + 0.5)
    taus = np.arange(ONSET_TAU_MIN, tau_max + step / 2, step)
    _, subleading = pf_moduli_batch(propagator_series(N, phi, taus), delta, TOL_UNIT)
    return _onset(taus, subleading, fraction)


def tau_star(N: int, phi: float, delta: int) -> TauStar:
    """
    Dark-state threshold at one phase

    Args:
        N: Number of sites
        phi: Chiral phase
        delta: Target site

    Returns:
        TauStar with the analytic minimum over the phase-matching condition and
        the empirical onset from the PF spectrum
    """
    WalkConfig(N=N, delta=delta, phi=phi, tau=1.0)
    result = TauStar(
        phi=phi,
        analytic=float(analytic_tau_star(N, phi)),
        empirical=empirical_tau_star(N, phi, delta),
    )
    if result.disagreement:
        logger.warning(
            "tau* estimates disagree at N=%d phi=%g: analytic %.6f, empirical %.6f",
            N, phi, result.analytic, result.empirical,
        )
    return result


def _golden_refine(objective, taus: np.ndarray, best: int, upper: float) -> Tuple[float, float]:
    """
    Golden-section minimum of objective around grid index best

    taus must be ascending. Falls back to the grid point when the neighbours
    do not bracket a minimum or the refined point is no better.
    """
    grid_tau, grid_value = float(taus[best]), objective(float(taus[best]))
    if best == 0 or best == len(taus) - 1:
        return grid_tau, grid_value
    lo, hi = float(taus[best - 1]), min(float(taus[best + 1]), upper)
    if not lo < grid_tau < hi:
        return grid_tau, grid_value
    try:
        result = minimize_scalar(
            objective, bracket=(lo, grid_tau, hi), method="golden",
            options={"xtol": GOLDEN_XTOL},
        )
    except ValueError as e:
        logger.debug("golden bracket rejected at tau=%g: %s", grid_tau, e)
        return grid_tau, grid_value
    if lo < result.x < hi and result.fun < grid_value:
        return float(result.x), float(result.fun)
    return grid_tau, grid_value


def _pdet_objective(N: int, delta: int, phi: float, T: float):
    def objective(tau: float) -> float:
        config = WalkConfig(N=N, delta=delta, phi=phi, tau=tau, total_time=T)
        return -detection_probability_at_budget(config)
    return objective


def _modulus_objective(N: int, delta: int, phi: float, subleading: bool):
    def objective(tau: float) -> float:
        lead, sub = pf_moduli_batch(propagator_series(N, phi, [tau]), delta, TOL_UNIT)
        return float(sub[0] if subleading else lead[0])
    return objective


def pf_optimal_period(
    N: int,
    delta: int,
    phi: float,
    tau_values: Optional[Sequence[float]] = None,
) -> float:
    """
    tau_PF: period below tau* minimising the relevant PF modulus

    Odd N uses |mu_PF|; even N uses the subleading modulus, since the
    degenerate-level dark modes do not overlap |0>.
    """
    taus = np.asarray(default_tau_grid() if tau_values is None else tau_values, dtype=float)
    upper = float(analytic_tau_star(N, phi))
    taus = taus[taus < upper]
    if taus.size == 0:
        raise BudgetError(f"no grid period below tau*={upper:.6g}")
    leading, subleading = pf_moduli_batch(propagator_series(N, phi, taus), delta, TOL_UNIT)
    use_sub = N % 2 == 0
    moduli = subleading if use_sub else leading
    best = int(np.argmin(moduli))
    tau_pf, _ = _golden_refine(_modulus_objective(N, delta, phi, use_sub), taus, best, upper)
    return tau_pf


def _canonical_phase(N: int, delta: int, phi: float) -> Tuple[float, int]:
    if N % 2 and phi < 0:
        return -phi, N - delta
    return phi, delta


def optimize(
    N: int,
    delta: int,
    T: float = DEFAULT_TOTAL_TIME,
    phi_values: Optional[Sequence[float]] = None,
    tau_values: Optional[Sequence[float]] = None,
    workers: int = 1,
) -> Optimum:
    """
    Maximise P_det over (phi, tau) in the smooth region tau < tau*(phi)

    Args:
        N: Number of sites
        delta: Target site
        T: Observation budget
        phi_values: Phase grid (default 101 points)
        tau_values: Period grid (default 150 points)
        workers: Sweep worker processes

    Returns:
        Optimum with the grid argmax refined by golden-section search in tau
    """
    template = WalkConfig(N=N, delta=delta, phi=0.0, tau=min(1.0, T), total_time=T)
    grid = sweep(template, phi_values, tau_values, workers)
    limits = analytic_tau_star(N, grid.phi_values)
    allowed = grid.tau_values[None, :] < limits[:, None]
    if not allowed.any():
        raise BudgetError("no grid cell lies below tau*")
    masked = np.where(allowed, grid.results, -np.inf)
    best_value = masked.max()

    # Ties (even-N mirror symmetry) go to the smallest |phi|, then phi > 0
    rows, cols = np.nonzero(masked >= best_value - 1e-12)
    order = sorted(zip(rows, cols), key=lambda rc: (abs(grid.phi_values[rc[0]]), -grid.phi_values[rc[0]]))
    row, col = order[0]
    phi = float(grid.phi_values[row])
    if N % 2 == 0 and abs(phi) < 1e-12:
        phi = 0.0

    tau_limit = float(limits[row])
    tau_opt, value = _golden_refine(
        _pdet_objective(N, delta, phi, T), grid.tau_values, int(col), tau_limit
    )
    tau_pf = pf_optimal_period(N, delta, phi if N % 2 else 0.0, grid.tau_values)

    phi_opt, target = _canonical_phase(N, delta, phi)
    mirror_phi, mirror_delta = -phi_opt if phi_opt else 0.0, (N - target) % N
    optimum = Optimum(
        N=N,
        delta=target,
        total_time=T,
        phi_opt=phi_opt,
        tau_opt=tau_opt,
        tau_star=tau_limit,
        tau_star_empirical=empirical_tau_star(N, phi_opt, target),
        tau_pf=tau_pf,
        pdet_at_opt=-value,
        pdet_grid_max=float(best_value),
        mirror_phi=mirror_phi,
        mirror_delta=mirror_delta,
    )
    logger.info(
        "optimum N=%d T=%g: phi=%.6f tau=%.6f P_det=%.6f (tau*=%.6f, tau_PF=%.6f)",
        N, T, phi_opt, tau_opt, optimum.pdet_at_opt, tau_limit, tau_pf,
    )
    return optimum


def pdet_vs_size_and_budget(
    N_values: Sequence[int],
    T_values: Sequence[float],
    tau_values: Optional[Sequence[float]] = None,
) -> SizeBudgetTable:
    """
    P_det at the reference protocol of each N for several budgets

    Each N uses reference_protocol(N) at its tau_PF. The saturation budget
    is the smallest T whose P_det exceeds 0.99 of the dark-state limit.

    Returns:
        SizeBudgetTable with pdet[i, j] for N_values[i] and T_values[j]
    """
    T_sorted = [float(T) for T in T_values]
    pdet = np.empty((len(N_values), len(T_sorted)))
    taus, phis, limits, saturation = [], [], [], []
    for i, N in enumerate(N_values):
        delta, phi = reference_protocol(N)
        tau = pf_optimal_period(N, delta, phi, tau_values)
        config = WalkConfig(N=N, delta=delta, phi=phi, tau=tau, total_time=max(T_sorted))
        record = first_detection_series(config, config.attempts)
        for j, T in enumerate(T_sorted):
            n = attempt_count(T, tau)
            pdet[i, j] = record.pdet(n) if n >= 1 else 0.0
        limit = dark_report(config).pdet_infinity
        reached = [T for T, p in zip(T_sorted, pdet[i]) if p > SATURATION_FRACTION * limit]
        taus.append(tau)
        phis.append(phi)
        limits.append(limit)
        saturation.append(min(reached) if reached else float("nan"))
        logger.info("size N=%d: tau_PF=%.6f, P_det(max T)=%.6f", N, tau, pdet[i, -1])
    return SizeBudgetTable(
        N_values=list(N_values),
        T_values=T_sorted,
        tau_values=taus,
        phi_values=phis,
        pdet=pdet,
        pdet_infinity=limits,
        saturation_T=saturation,
    )


def tas_vs_tau(N: int, phi: float, delta: int, tau_values: Sequence[float]) -> List[TasPoint]:
    """
    Spectral gap and asymptotic time scale along tau

    Returns:
        One TasPoint per period; t_as is infinite where the gap closes
    """
    points = []
    for tau in tau_values:
        spectrum = pf_spectrum(WalkConfig(N=N, delta=delta, phi=phi, tau=float(tau)))
        points.append(TasPoint(float(tau), spectrum.gap, spectrum.t_asymptotic))
    return points


def pdet_vs_tau(
    N_values: Sequence[int],
    tau_values: Sequence[float],
    T: float = DEFAULT_TOTAL_TIME,
) -> np.ndarray:
    """
    P_det(T) along tau at the reference protocol of each N

    Returns:
        Array of shape (len(N_values), len(tau_values))
    """
    pdet = np.empty((len(N_values), len(tau_values)))
    for i, N in enumerate(N_values):
        delta, phi = reference_protocol(N)
        for j, tau in enumerate(tau_values):
            config = WalkConfig(N=N, delta=delta, phi=phi, tau=float(tau), total_time=T)
            pdet[i, j] = detection_probability_at_budget(config)
    return pdet


def optimal_period_trend(
    N_values: Sequence[int],
    T_values: Sequence[float],
    tau_values: Optional[Sequence[float]] = None,
) -> List[TrendPoint]:
    """
    Finite-budget optimal period next to tau_PF for several sizes and budgets

    tau_opt maximises P_det(T) along tau below tau* at the reference protocol.
    """
    taus = np.asarray(default_tau_grid() if tau_values is None else tau_values, dtype=float)
    points = []
    for N in N_values:
        delta, phi = reference_protocol(N)
        upper = float(analytic_tau_star(N, phi))
        below = taus[taus < upper]
        tau_pf = pf_optimal_period(N, delta, phi, taus)
        for T in T_values:
            candidates = below[below <= T]
            if candidates.size == 0:
                raise BudgetError(f"no grid period fits below tau* within T={T}")
            objective = _pdet_objective(N, delta, phi, float(T))
            values = np.array([objective(float(tau)) for tau in candidates])
            tau_opt, _ = _golden_refine(objective, candidates, int(np.argmin(values)), upper)
            points.append(TrendPoint(N, float(T), tau_opt, tau_pf))
            logger.debug("trend N=%d T=%g: tau_opt=%.6f tau_PF=%.6f", N, T, tau_opt, tau_pf)
    return points


def summarize_optimum(optimum: Optimum) -> Dict[str, float]:
    """Flat mapping of an Optimum for table output"""
    return {
        "N": optimum.N,
        "delta": optimum.delta,
        "T": optimum.total_time,
        "phi_opt": optimum.phi_opt,
        "tau_opt": optimum.tau_opt,
        "pdet": optimum.pdet_at_opt,
        "pdet_grid_max": optimum.pdet_grid_max,
        "tau_star": optimum.tau_star,
        "tau_star_empirical": optimum.tau_star_empirical,
        "tau_pf": optimum.tau_pf,
        "mirror_phi": optimum.mirror_phi,
        "mirror_delta": optimum.mirror_delta,
    }
