"""
Unit Tests for the Chiral Ring Model
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from models.errors import ConfigError
from models.ring_model import (
    WalkConfig,
    analytic_spectrum,
    attempt_count,
    build_hamiltonian,
    propagator,
    propagator_for,
    propagator_series,
    propagator_stack,
    translation_matrix,
    unitary_transfer_map,
    unitary_transfer_probability,
)


@st.composite
def ring_phases(draw, max_sites=12):
    """(N, phi) with |phi| <= pi / N"""
    N = draw(st.integers(min_value=3, max_value=max_sites))
    fraction = draw(st.floats(min_value=-1.0, max_value=1.0))
    return N, fraction * math.pi / N


class TestWalkConfig:
    """Test configuration validation"""

    def test_valid_config(self):
        """Test a typical configuration"""
        config = WalkConfig(N=21, delta=10, phi=math.pi / 42, tau=1.4)
        assert config.total_time == 200.0
        assert config.attempts == 142

    @pytest.mark.parametrize("changes,key", [
        ({"N": 2}, "N"),
        ({"delta": 0}, "delta"),
        ({"delta": 21}, "delta"),
        ({"phi": 1.0}, "phi"),
        ({"tau": 0.0}, "tau"),
        ({"tau": -1.0}, "tau"),
        ({"total_time": 0.0}, "total_time"),
    ])
    def test_invalid_values_name_the_key(self, changes, key):
        """Test that every violated bound names its key"""
        values = {"N": 21, "delta": 10, "phi": 0.0, "tau": 1.0}
        values.update(changes)
        with pytest.raises(ConfigError) as excinfo:
            WalkConfig(**values)
        assert excinfo.value.key == key

    def test_phase_bound_is_inclusive(self):
        """Test that phi = +-pi/N is accepted"""
        WalkConfig(N=20, delta=10, phi=math.pi / 20, tau=1.0)
        WalkConfig(N=20, delta=10, phi=-math.pi / 20, tau=1.0)

    def test_with_params_revalidates(self):
        """Test that copies are validated again"""
        config = WalkConfig(N=21, delta=10, phi=0.0, tau=1.0)
        assert config.with_params(tau=2.0).tau == 2.0
        with pytest.raises(ConfigError):
            config.with_params(delta=30)

    def test_attempt_count_exact_ratio(self):
        """Test that exact ratios are not lost to rounding"""
        assert attempt_count(200.0, 0.02) == 10000
        assert attempt_count(200.0, 0.3) == 666
        assert attempt_count(0.5, 1.0) == 0


class TestHamiltonian:
    """Test the ring Hamiltonian and its spectrum"""

    @settings(max_examples=40, deadline=None)
    @given(ring_phases())
    def test_hermitian(self, params):
        """Test H = H^dagger"""
        N, phi = params
        H = build_hamiltonian(N, phi)
        np.testing.assert_allclose(H, H.conj().T, atol=1e-15)

    def test_hopping_convention(self):
        """Test H[(j+1) % N, j] = exp(-i phi)"""
        H = build_hamiltonian(5, 0.3)
        assert H[1, 0] == pytest.approx(np.exp(-0.3j))
        assert H[0, 4] == pytest.approx(np.exp(-0.3j))
        assert H[4, 0] == pytest.approx(np.exp(0.3j))

    @settings(max_examples=40, deadline=None)
    @given(ring_phases())
    def test_analytic_eigenpairs(self, params):
        """Test H |lambda_j> = lambda_j |lambda_j>"""
        N, phi = params
        H = build_hamiltonian(N, phi)
        spectrum = analytic_spectrum(N, phi)
        residual = H @ spectrum.eigenvectors - spectrum.eigenvectors * spectrum.eigenvalues
        assert np.abs(residual).max() < 1e-12

    def test_four_site_levels(self):
        """Test the N = 4, phi = 0 levels"""
        spectrum = analytic_spectrum(4, 0.0)
        np.testing.assert_allclose(spectrum.eigenvalues, [2.0, 0.0, -2.0, 0.0], atol=1e-12)

    def test_eigenvectors_orthonormal(self):
        """Test that the Fourier basis is unitary"""
        V = analytic_spectrum(9, 0.1).eigenvectors
        np.testing.assert_allclose(V.conj().T @ V, np.eye(9), atol=1e-12)

    def test_even_ring_degeneracies(self):
        """Test the twofold degeneracies of N = 20 at phi = 0"""
        levels = analytic_spectrum(20, 0.0).eigenvalues
        for j in range(1, 10):
            assert levels[j] == pytest.approx(levels[20 - j], abs=1e-12)

    def test_translation_symmetry(self):
        """Test S H S^dagger = H"""
        S = translation_matrix(7)
        H = build_hamiltonian(7, 0.2)
        np.testing.assert_allclose(S @ H @ S.conj().T, H, atol=1e-15)

    def test_rejects_small_ring(self):
        """Test that N < 3 is refused"""
        with pytest.raises(ConfigError):
            build_hamiltonian(2, 0.0)


class TestPropagator:
    """Test the unitary propagator"""

    @settings(max_examples=30, deadline=None)
    @given(ring_phases(), st.floats(min_value=-5.0, max_value=5.0))
    def test_unitary(self, params, t):
        """Test U U^dagger = I"""
        N, phi = params
        U = propagator_for(N, phi, t)
        np.testing.assert_allclose(U @ U.conj().T, np.eye(N), atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(ring_phases(), st.floats(min_value=0.0, max_value=5.0))
    def test_matches_matrix_exponential(self, params, t):
        """Test U(t) = expm(-i H t)"""
        N, phi = params
        expected = scipy.linalg.expm(-1j * t * build_hamiltonian(N, phi))
        np.testing.assert_allclose(propagator_for(N, phi, t), expected, atol=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(ring_phases(), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
    def test_composition(self, params, t1, t2):
        """Test U(t1) U(t2) = U(t1 + t2)"""
        N, phi = params
        combined = propagator_for(N, phi, t1) @ propagator_for(N, phi, t2)
        np.testing.assert_allclose(combined, propagator_for(N, phi, t1 + t2), atol=1e-12)

    def test_negative_time_is_inverse(self):
        """Test U(-t) = U(t)^dagger"""
        U = propagator_for(8, 0.1, 1.3)
        np.testing.assert_allclose(propagator_for(8, 0.1, -1.3), U.conj().T, atol=1e-13)

    def test_zero_time_is_identity(self):
        """Test U(0) = I"""
        config = WalkConfig(N=6, delta=3, phi=0.2, tau=1.0)
        np.testing.assert_allclose(propagator(config, 0.0), np.eye(6), atol=1e-14)

    def test_stack_and_series_agree(self):
        """Test the batched propagators against single calls"""
        phis = [-0.1, 0.0, 0.2]
        stack = propagator_stack(9, phis, 0.7)
        for phi, U in zip(phis, stack):
            np.testing.assert_allclose(U, propagator_for(9, phi, 0.7), atol=1e-13)
        times = [0.1, 1.0, 2.5]
        series = propagator_series(9, 0.2, times)
        for t, U in zip(times, series):
            np.testing.assert_allclose(U, propagator_for(9, 0.2, t), atol=1e-13)


class TestUnitaryTransfer:
    """Test the unmonitored transfer probability"""

    def test_matches_propagator_element(self):
        """Test P_delta(t) = |<delta|U(t)|0>|^2"""
        config = WalkConfig(N=11, delta=5, phi=0.1, tau=1.0)
        for t in (0.0, 0.5, 3.0, 10.0):
            expected = abs(propagator(config, t)[5, 0]) ** 2
            assert unitary_transfer_probability(config, t) == pytest.approx(expected, abs=1e-12)

    def test_starts_at_zero(self):
        """Test that the walker starts away from the target"""
        config = WalkConfig(N=11, delta=5, phi=0.1, tau=1.0)
        assert unitary_transfer_probability(config, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_map_matches_pointwise(self):
        """Test the (phi, t) map against pointwise values"""
        phis = np.array([-0.2, 0.0, 0.25])
        times = np.array([0.5, 2.0, 7.5, 12.0])
        grid = unitary_transfer_map(11, 5, phis, times)
        assert grid.shape == (3, 4)
        for i, phi in enumerate(phis):
            config = WalkConfig(N=11, delta=5, phi=float(phi), tau=1.0)
            for j, t in enumerate(times):
                assert grid[i, j] == pytest.approx(unitary_transfer_probability(config, t), abs=1e-12)
        assert np.all(grid <= 1.0 + 1e-12)

    def test_even_ring_dark_phase(self):
        """Test that the antipode is never reached at phi = pi/N for even N"""
        probabilities = unitary_transfer_map(20, 10, [math.pi / 20], np.linspace(0, 50, 101))
        assert probabilities.max() < 1e-20


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
