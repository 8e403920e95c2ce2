"""
Perron-Frobenius Analysis
Spectrum of the non-unitary evolve-and-fail-to-detect operator O = (I - D) U(tau)

O is non-normal, so its right eigenvectors are not orthogonal. The
spectral survival formula is therefore treated as an estimate and is always
reported next to the value obtained by direct iteration.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np
import scipy.linalg

from .errors import DecompositionError
from .monitored_dynamics import first_detection_series, initial_state
from .ring_model import ComplexMatrix, WalkConfig, propagator

logger = logging.getLogger(__name__)

# Squared overlap below which the initial state counts as orthogonal to the dark modes
DARK_OVERLAP_TOL = 1e-12
NULL_TOL = 1e-9
CLUSTER_TOL = 1e-9


@dataclass(frozen=True)
class PFSpectrum:
    """
    Eigendecomposition of O for one configuration

    eigenvalues are sorted by descending modulus and right_eigenvectors[:, j]
    (unit norm) belongs to eigenvalues[j]. overlaps[j] is |<mu_j|0>|^2, with
    eigenvalues that coincide within 1e-9 sharing the projection of |0> on
    their common span equally.
    """

    config: WalkConfig
    eigenvalues: np.ndarray
    right_eigenvectors: ComplexMatrix
    overlaps: np.ndarray
    leading_modulus: float
    subleading_modulus: float
    gap: float
    t_asymptotic: float
    dark_overlap: float
    unit_count: int
    null_count: int

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    @property
    def dark_modes_relevant(self) -> bool:
        """True when |0> has weight on the unit-modulus modes"""
        return self.dark_overlap >= DARK_OVERLAP_TOL


@dataclass(frozen=True)
class SurvivalEstimate:
    """Spectral survival estimate alongside the iterated reference"""

    n: int
    estimate: float
    iterated: float

    @property
    def deviation(self) -> float:
        return self.estimate - self.iterated


def build_pf_operator(config: WalkConfig) -> ComplexMatrix:
    """
    Perron-Frobenius operator O = (I - |delta><delta|) U(tau)

    Returns:
        U(tau) with its delta-th row set to zero
    """
    O = propagator(config, config.tau)
    O[config.delta, :] = 0.0
    return O


def _clusters(eigenvalues: np.ndarray, tol: float) -> List[List[int]]:
    """Group indices whose eigenvalues lie within tol of each other (single linkage)"""
    labels = list(range(len(eigenvalues)))

    def root(i):
        while labels[i] != i:
            labels[i] = labels[labels[i]]
            i = labels[i]
        return i

    close = np.abs(eigenvalues[:, None] - eigenvalues[None, :]) < tol
    for i, j in zip(*np.nonzero(np.triu(close, k=1))):
        labels[root(i)] = root(j)
    groups = {}
    for i in range(len(eigenvalues)):
        groups.setdefault(root(i), []).append(i)
    return sorted(groups.values())


def _projection_weight(vectors: np.ndarray, state: np.ndarray) -> float:
    """Squared norm of the projection of state on the column span of vectors"""
    if vectors.shape[1] == 0:
        return 0.0
    basis = scipy.linalg.orth(vectors)
    return float(np.sum(np.abs(basis.conj().T @ state) ** 2))


def _overlaps(eigenvalues: np.ndarray, vectors: np.ndarray, state: np.ndarray) -> np.ndarray:
    overlaps = np.empty(len(eigenvalues))
    for group in _clusters(eigenvalues, CLUSTER_TOL):
        if len(group) == 1:
            overlaps[group[0]] = abs(np.vdot(vectors[:, group[0]], state)) ** 2
        else:
            overlaps[group] = _projection_weight(vectors[:, group], state) / len(group)
    return overlaps


@lru_cache(maxsize=128)
def pf_spectrum(config: WalkConfig) -> PFSpectrum:
    """
    Full eigendecomposition of the Perron-Frobenius operator

    Args:
        config: Walk configuration

    Returns:
        PFSpectrum with sorted eigenpairs, moduli, gap and asymptotic scale

    Raises:
        DecompositionError: if the eigensolver fails
    """
    O = build_pf_operator(config)
    try:
        eigenvalues, vectors = scipy.linalg.eig(O)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise DecompositionError(config, f"eigensolver failed: {e}") from e
    if not (np.all(np.isfinite(eigenvalues)) and np.all(np.isfinite(vectors))):
        raise DecompositionError(config, "eigensolver returned non-finite values")

    order = np.argsort(-np.abs(eigenvalues), kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]
    vectors = vectors / np.linalg.norm(vectors, axis=0)

    psi0 = initial_state(config.N)
    moduli = np.abs(eigenvalues)
    unit = 1.0 - moduli < config.tol_unit
    leading = float(moduli[0])
    subleading = float(moduli[~unit].max()) if np.any(~unit) else 0.0
    dark_overlap = _projection_weight(vectors[:, unit], psi0)

    relevant = leading if dark_overlap >= DARK_OVERLAP_TOL else subleading
    gap, t_as = _scale(relevant, config.tol_unit)

    for array in (eigenvalues, vectors):
        array.setflags(write=False)
    overlaps = _overlaps(eigenvalues, vectors, psi0)
    overlaps.setflags(write=False)
    logger.debug(
        "PF spectrum %s: |mu_PF|=%.12g, sub=%.12g, unit modes=%d",
        config, leading, subleading, int(unit.sum()),
    )
    return PFSpectrum(
        config=config,
        eigenvalues=eigenvalues,
        right_eigenvectors=vectors,
        overlaps=overlaps,
        leading_modulus=leading,
        subleading_modulus=subleading,
        gap=gap,
        t_asymptotic=t_as,
        dark_overlap=dark_overlap,
        unit_count=int(unit.sum()),
        null_count=int(np.sum(moduli < NULL_TOL)),
    )


def _scale(modulus: float, tol_unit: float) -> Tuple[float, float]:
    gap = max(1.0 - modulus, 0.0)
    t_as = 1.0 / gap if gap >= tol_unit else float("inf")
    return gap, t_as


def asymptotic_scale(config: WalkConfig, dark_overlap_zero: bool) -> Tuple[float, float]:
    """
    Spectral gap and asymptotic time scale t_as = 1 / gap

    Args:
        config: Walk configuration
        dark_overlap_zero: True when the initial state is orthogonal to every
            unit-modulus mode; the gap is then taken from the subleading modulus

    Returns:
        Tuple (gap, t_as); t_as is infinite when the gap is below tol_unit
    """
    spectrum = pf_spectrum(config)
    modulus = spectrum.subleading_modulus if dark_overlap_zero else spectrum.leading_modulus
    return _scale(modulus, config.tol_unit)


def survival_spectral_estimate(config: WalkConfig, n: int) -> SurvivalEstimate:
    """
    Spectral survival sum_j |mu_j|^(2n) |<mu_j|0>|^2 and its iterated counterpart

    Args:
        config: Walk configuration
        n: Number of attempts (>= 0)

    Returns:
        SurvivalEstimate; deviation exposes the non-normality error
    """
    if n < 0:
        raise ValueError(f"attempt count must be >= 0, got {n}")
    spectrum = pf_spectrum(config)
    estimate = float(np.sum(spectrum.moduli ** (2 * n) * spectrum.overlaps))
    iterated = 1.0 if n == 0 else first_detection_series(config, n).survival(n)
    return SurvivalEstimate(n=n, estimate=estimate, iterated=iterated)


def pf_moduli_batch(
    unitaries: np.ndarray,
    delta: int,
    tol_unit: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Leading and subleading eigenvalue moduli for a stack of propagators

    Args:
        unitaries: Array of shape (B, N, N) of one-period propagators
        delta: Target site
        tol_unit: Unit-modulus tolerance

    Returns:
        Tuple of arrays (leading, subleading), each of shape (B,)
    """
    operators = np.array(unitaries, dtype=complex)
    operators[:, delta, :] = 0.0
    moduli = np.abs(np.linalg.eigvals(operators))
    leading = moduli.max(axis=1)
    below = np.where(1.0 - moduli < tol_unit, -np.inf, moduli)
    subleading = np.maximum(below.max(axis=1), 0.0)
    return leading, subleading
