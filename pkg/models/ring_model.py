"""
Chiral Ring Model
Hamiltonian, closed-form spectrum and unitary propagator of the N-site ring

Units follow hbar = 1 with unit hopping amplitude. Sites are labelled
0..N-1 and the walker always starts on site 0.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)

# Carriers for H, U, O and for walker states; square (N, N) / length-N complex arrays
ComplexMatrix = np.ndarray
StateVector = np.ndarray

TOL_DEGENERATE = 1e-9
TOL_UNIT = 1e-9
TOL_PHASE = 1e-12
DEFAULT_TOTAL_TIME = 200.0


@dataclass(frozen=True)
class WalkConfig:
    """
    Experiment tuple (N, delta, phi, tau, T) plus numerical tolerances

    Args:
        N: Number of ring sites (>= 3)
        delta: Target site, 0 < delta < N
        phi: Chiral phase in radians, |phi| <= pi/N
        tau: Detection period (> 0)
        total_time: Observation budget T (> 0)
        tol_degenerate: Tolerance on |lambda_m - lambda_n| for degeneracies
        tol_unit: Tolerance on 1 - |mu| for unit-modulus eigenvalues
    """

    N: int
    delta: int
    phi: float
    tau: float
    total_time: float = DEFAULT_TOTAL_TIME
    tol_degenerate: float = TOL_DEGENERATE
    tol_unit: float = TOL_UNIT

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 3:
            raise ConfigError("N", f"site count must be an integer >= 3, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        if int(self.delta) != self.delta or not 0 < self.delta < self.N:
            raise ConfigError(
                "delta", f"target site must satisfy 0 < delta < {self.N}, got {self.delta}"
            )
        object.__setattr__(self, "delta", int(self.delta))
        if not math.isfinite(self.phi) or abs(self.phi) > math.pi / self.N + TOL_PHASE:
            raise ConfigError(
                "phi", f"|phi| must not exceed pi/N = {math.pi / self.N:.6g}, got {self.phi}"
            )
        if not math.isfinite(self.tau) or self.tau <= 0:
            raise ConfigError("tau", f"detection period must be > 0, got {self.tau}")
        if not math.isfinite(self.total_time) or self.total_time <= 0:
            raise ConfigError(
                "total_time", f"observation budget must be > 0, got {self.total_time}"
            )
        for key in ("tol_degenerate", "tol_unit"):
            if not getattr(self, key) > 0:
                raise ConfigError(key, "tolerance must be > 0")

    @property
    def attempts(self) -> int:
        """Number of detection attempts n = floor(T / tau) inside the budget"""
        return attempt_count(self.total_time, self.tau)

    def with_params(self, **changes) -> "WalkConfig":
        """Copy of this config with some fields replaced (validated again)"""
        return replace(self, **changes)


@dataclass(frozen=True)
class Spectrum:
    """
    Eigenpairs of the ring Hamiltonian

    eigenvectors[:, j] is |lambda_j> in the site basis.
    """

    eigenvalues: np.ndarray
    eigenvectors: ComplexMatrix

    @property
    def N(self) -> int:
        return self.eigenvalues.shape[0]


def attempt_count(total_time: float, tau: float) -> int:
    """
    Detection attempts that fit in the budget

    A 1e-9 guard keeps exact ratios such as 200 / 0.02 from being
    truncated by binary rounding.
    """
    return int(math.floor(total_time / tau + 1e-9))


def _check_size(N: int):
    if int(N) != N or N < 3:
        raise ConfigError("N", f"site count must be an integer >= 3, got {N}")


def build_hamiltonian(N: int, phi: float) -> ComplexMatrix:
    """
    Hamiltonian of the chiral walk on the N-cycle

    Args:
        N: Number of sites (>= 3)
        phi: Chiral phase in radians

    Returns:
        Hermitian (N, N) matrix with H[(j+1) % N, j] = exp(-i phi) and
        H[(j-1) % N, j] = exp(+i phi)
    """
    _check_size(N)
    H = np.zeros((N, N), dtype=complex)
    cols = np.arange(N)
    H[(cols + 1) % N, cols] = np.exp(-1j * phi)
    H[(cols - 1) % N, cols] = np.exp(1j * phi)
    return H


def translation_matrix(N: int) -> ComplexMatrix:
    """Cyclic shift S|k> = |k+1 mod N>"""
    _check_size(N)
    return np.roll(np.eye(N, dtype=complex), 1, axis=0)


@lru_cache(maxsize=64)
def _fourier_basis(N: int) -> np.ndarray:
    k = np.arange(N)
    basis = np.exp(-2j * np.pi * np.outer(k, k) / N) / np.sqrt(N)
    basis.setflags(write=False)
    return basis


def level_energies(N: int, phi) -> np.ndarray:
    """lambda_j = 2 cos(phi - 2 pi j / N); phi may be an array (broadcast on a new last axis)"""
    j = np.arange(N)
    return 2.0 * np.cos(np.asarray(phi, dtype=float)[..., None] - 2.0 * np.pi * j / N)


@lru_cache(maxsize=256)
def analytic_spectrum(N: int, phi: float) -> Spectrum:
    """
    Closed-form eigendecomposition of the circulant Hamiltonian

    Args:
        N: Number of sites (>= 3)
        phi: Chiral phase in radians

    Returns:
        Spectrum with lambda_j = 2 cos(phi - 2 pi j/N) and
        <k|lambda_j> = exp(-2 pi i j k / N) / sqrt(N)
    """
    _check_size(N)
    eigenvalues = level_energies(N, phi)
    eigenvalues.setflags(write=False)
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=_fourier_basis(N))


def _assemble(N: int, energies: np.ndarray, t) -> np.ndarray:
    basis = _fourier_basis(N)
    phases = np.exp(-1j * energies * t)
    return np.einsum("kj,...j,lj->...kl", basis, phases, basis.conj())


def propagator(config: WalkConfig, t: float) -> ComplexMatrix:
    """
    Unitary propagator U(t) = sum_j exp(-i lambda_j t) |lambda_j><lambda_j|

    Args:
        config: Walk configuration (N and phi are used)
        t: Evolution time; negative values give the inverse evolution

    Returns:
        (N, N) unitary matrix
    """
    return propagator_for(config.N, config.phi, t)


def propagator_for(N: int, phi: float, t: float) -> ComplexMatrix:
    """U(t) for a bare (N, phi) pair"""
    spectrum = analytic_spectrum(N, float(phi))
    return _assemble(N, spectrum.eigenvalues, t)


def propagator_stack(N: int, phi_values: Sequence[float], t: float) -> np.ndarray:
    """
    Propagators for several phases at once

    Returns:
        Array of shape (len(phi_values), N, N)
    """
    _check_size(N)
    energies = level_energies(N, np.asarray(phi_values, dtype=float))
    return _assemble(N, energies, t)


def propagator_series(N: int, phi: float, t_values: Sequence[float]) -> np.ndarray:
    """
    Propagators of one (N, phi) ring at several times

    Returns:
        Array of shape (len(t_values), N, N)
    """
    spectrum = analytic_spectrum(N, float(phi))
    t = np.asarray(t_values, dtype=float)[:, None]
    return _assemble(N, spectrum.eigenvalues[None, :], t)


def unitary_transfer_probability(config: WalkConfig, t: float) -> float:
    """
    Probability |<delta|U(t)|0>|^2 of finding the unmonitored walker at the target

    Args:
        config: Walk configuration
        t: Time (>= 0)

    Returns:
        Transfer probability in [0, 1]
    """
    spectrum = analytic_spectrum(config.N, float(config.phi))
    basis = spectrum.eigenvectors
    amplitude = np.sum(
        np.exp(-1j * spectrum.eigenvalues * t) * basis[config.delta] * basis[0].conj()
    )
    return float(abs(amplitude) ** 2)


def unitary_transfer_map(
    N: int,
    delta: int,
    phi_values: Sequence[float],
    t_values: Sequence[float],
) -> np.ndarray:
    """
    Unmonitored transfer probability on a (phi, t) grid

    Args:
        N: Number of sites
        delta: Target site
        phi_values: Phases (rows of the result)
        t_values: Times (columns of the result)

    Returns:
        Array of shape (len(phi_values), len(t_values))
    """
    _check_size(N)
    basis = _fourier_basis(N)
    weights = basis[delta] * basis[0].conj()
    energies = level_energies(N, np.asarray(phi_values, dtype=float))
    t = np.asarray(t_values, dtype=float)
    phases = np.exp(-1j * energies[:, None, :] * t[None, :, None])
    amplitudes = phases @ weights
    logger.debug("unitary transfer map N=%d grid %s", N, amplitudes.shape)
    return np.abs(amplitudes) ** 2
