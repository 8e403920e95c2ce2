"""
Unit Tests for the Protocol Optimizer
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from models.errors import BudgetError, ConfigError
from models.monitored_dynamics import detection_probability_at_budget
from models.optimizer import (
    TauStar,
    analytic_tau_star,
    default_phi_grid,
    default_tau_grid,
    empirical_tau_star,
    optimal_period_trend,
    optimize,
    pdet_vs_size_and_budget,
    pdet_vs_tau,
    pf_optimal_period,
    reference_protocol,
    summarize_optimum,
    sweep,
    tas_vs_tau,
    tau_star,
)
from models.ring_model import WalkConfig, unitary_transfer_map


@pytest.fixture(scope="module")
def odd_optimum():
    """Optimum of N = 21, delta = 10, T = 200 on the default grid"""
    return optimize(21, 10, 200.0)


@pytest.fixture(scope="module")
def even_optimum():
    """Optimum of N = 20, delta = 10, T = 200 on the default grid"""
    return optimize(20, 10, 200.0)


class TestGrids:
    """Test default grids and reference protocols"""

    def test_default_grids(self):
        """Test grid sizes and end points"""
        phis = default_phi_grid(21)
        assert phis.size == 101
        assert phis[0] == pytest.approx(-math.pi / 21)
        assert phis[25] == pytest.approx(-math.pi / 42)
        taus = default_tau_grid()
        assert taus.size == 150
        assert (taus[0], taus[-1]) == pytest.approx((0.02, 3.0))

    def test_reference_protocol(self):
        """Test ((N - 1)/2, pi/2N) for odd N and (N/2, 0) for even N"""
        delta, phi = reference_protocol(21)
        assert delta == 10
        assert phi == pytest.approx(math.pi / 42)
        assert reference_protocol(20) == (10, 0.0)


class TestTauStar:
    """Test the dark-state threshold"""

    def test_even_ring_analytic(self):
        """Test tau* = pi/2 for N = 20 at phi = 0"""
        assert float(analytic_tau_star(20, 0.0)) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_analytic_is_vectorized(self):
        """Test one threshold per phase"""
        phis = np.linspace(-math.pi / 21, math.pi / 21, 7)
        values = analytic_tau_star(21, phis)
        assert values.shape == (7,)
        assert np.all(values >= math.pi / 2 - 1e-12)

    def test_large_ring_approaches_bound(self):
        """Test that tau* -> pi/2 for large N"""
        assert float(analytic_tau_star(101, 0.01)) == pytest.approx(math.pi / 2, abs=0.05)

    def test_even_ring_empirical(self):
        """Test the PF onset near tau = 1.55 for N = 20"""
        assert 1.45 <= empirical_tau_star(20, 0.0, 10) <= 1.65

    def test_odd_ring_estimates_agree(self):
        """Test analytic and empirical tau* at phi = pi/42 for N = 21"""
        result = tau_star(21, math.pi / 42, 10)
        assert 1.45 <= result.empirical <= 1.65
        assert not result.disagreement

    def test_missing_onset_is_a_disagreement(self):
        """Test that a NaN estimate is flagged"""
        assert TauStar(phi=0.0, analytic=1.6, empirical=float("nan")).disagreement
        assert TauStar(phi=0.0, analytic=1.6, empirical=1.62).disagreement is False

    def test_invalid_phase(self):
        """Test that out-of-range phases are refused"""
        with pytest.raises(ConfigError):
            tau_star(21, 1.0, 10)


class TestSweep:
    """Test the (phi, tau) sweep"""

    def test_single_cell_matches_direct_run(self):
        """Test one grid cell against detection_probability_at_budget"""
        template = WalkConfig(N=11, delta=5, phi=0.0, tau=1.0, total_time=100.0)
        grid = sweep(template, [0.1], [0.7])
        expected = detection_probability_at_budget(template.with_params(phi=0.1, tau=0.7))
        assert grid.results.shape == (1, 1)
        assert grid.results[0, 0] == pytest.approx(expected, abs=1e-12)
        assert grid.attempts.tolist() == [142]

    def test_even_ring_dark_rows(self):
        """Test zero rows at phi = +-pi/20 and mirror symmetry"""
        template = WalkConfig(N=20, delta=10, phi=0.0, tau=1.0)
        phis = np.linspace(-math.pi / 20, math.pi / 20, 5)
        grid = sweep(template, phis, [0.5, 1.0, 1.4])
        assert grid.results[0].max() < 1e-10
        assert grid.results[-1].max() < 1e-10
        np.testing.assert_allclose(grid.results, grid.results[::-1], atol=1e-10)
        assert np.all(np.isinf(grid.t_asymptotic[0]))
        assert np.all(grid.gaps[2] > 0.0)
        assert np.all(np.isfinite(grid.t_asymptotic[2]))

    def test_odd_ring_argmax_at_half_step(self):
        """Test that P_det peaks at phi = +-pi/42 for tau in (0.3, 1.5)"""
        template = WalkConfig(N=21, delta=10, phi=0.0, tau=1.0)
        phis = default_phi_grid(21)
        grid = sweep(template, phis, [0.4, 0.7, 1.0, 1.3])
        step = phis[1] - phis[0]
        for column in grid.results.T:
            best = phis[int(np.argmax(column))]
            assert abs(abs(best) - math.pi / 42) <= step + 1e-12

    def test_workers_do_not_change_results(self):
        """Test identical grids in process and across workers"""
        template = WalkConfig(N=9, delta=4, phi=0.0, tau=1.0, total_time=30.0)
        phis = np.linspace(-math.pi / 9, math.pi / 9, 7)
        taus = np.linspace(0.2, 2.0, 6)
        serial = sweep(template, phis, taus, workers=1)
        parallel = sweep(template, phis, taus, workers=2)
        np.testing.assert_array_equal(serial.results, parallel.results)
        np.testing.assert_array_equal(serial.pf_moduli, parallel.pf_moduli)

    def test_period_beyond_budget(self):
        """Test that tau > T is reported"""
        template = WalkConfig(N=9, delta=4, phi=0.0, tau=1.0, total_time=1.0)
        with pytest.raises(BudgetError):
            sweep(template, [0.0], [0.5, 2.0])

    def test_phase_out_of_range(self):
        """Test that grid phases are validated"""
        template = WalkConfig(N=9, delta=4, phi=0.0, tau=1.0)
        with pytest.raises(ConfigError):
            sweep(template, [0.0, 1.0], [1.0])


class TestOptimize:
    """Test the budgeted optimum"""

    def test_odd_ring_phase(self, odd_optimum):
        """Test phi_opt = pi/42 within one grid cell"""
        step = 2 * math.pi / 21 / 100
        assert odd_optimum.phi_opt >= 0.0
        assert abs(odd_optimum.phi_opt - math.pi / 42) <= step + 1e-12

    def test_odd_ring_high_detection(self, odd_optimum):
        """Test P_det > 0.9 at the optimum"""
        assert odd_optimum.pdet_at_opt > 0.9
        assert odd_optimum.pdet_at_opt >= odd_optimum.pdet_grid_max - 1e-12

    def test_periods_below_threshold(self, odd_optimum):
        """Test tau_opt and tau_PF below tau*"""
        assert odd_optimum.tau_opt < odd_optimum.tau_star
        assert odd_optimum.tau_pf < odd_optimum.tau_star
        assert 1.45 <= odd_optimum.tau_star_empirical <= 1.65

    def test_mirror_solution(self, odd_optimum):
        """Test that the mirror protocol reaches the same P_det"""
        assert odd_optimum.mirror_phi == -odd_optimum.phi_opt
        assert odd_optimum.mirror_delta == 21 - odd_optimum.delta
        config = WalkConfig(N=21, delta=odd_optimum.delta, phi=odd_optimum.phi_opt, tau=odd_optimum.tau_opt)
        mirrored = config.with_params(phi=odd_optimum.mirror_phi, delta=odd_optimum.mirror_delta)
        assert detection_probability_at_budget(config) == pytest.approx(
            detection_probability_at_budget(mirrored), abs=1e-10
        )

    def test_even_ring_phase(self, even_optimum):
        """Test phi_opt = 0 within one grid cell"""
        step = 2 * math.pi / 20 / 100
        assert abs(even_optimum.phi_opt) <= step + 1e-12
        assert even_optimum.tau_opt < math.pi / 2
        assert even_optimum.mirror_delta == 10

    def test_summary_keys(self, odd_optimum):
        """Test the flat table form"""
        summary = summarize_optimum(odd_optimum)
        assert list(summary)[:5] == ["N", "delta", "T", "phi_opt", "tau_opt"]
        assert summary["pdet"] == odd_optimum.pdet_at_opt

    def test_long_budget_approaches_pf_period(self):
        """Test tau_opt within one grid step of tau_PF at T = 2000"""
        optimum = optimize(21, 10, 2000.0)
        step = default_tau_grid()[1] - default_tau_grid()[0]
        assert abs(optimum.tau_opt - optimum.tau_pf) <= step + 1e-9

    def test_unmonitored_walk_detects_less(self):
        """Test that max_t P_delta(t) on [0, 200] stays below monitored P_det"""
        baseline = unitary_transfer_map(20, 10, [0.0], np.linspace(0.0, 200.0, 2001))
        monitored = detection_probability_at_budget(
            WalkConfig(N=20, delta=10, phi=0.0, tau=1.4, total_time=200.0)
        )
        assert monitored > 0.99
        assert baseline.max() < monitored - 0.2


class TestTrends:
    """Test the size, budget and period studies"""

    def test_pf_period_below_threshold(self):
        """Test tau_PF < tau* for both parities"""
        assert pf_optimal_period(20, 10, 0.0) < math.pi / 2
        upper = float(analytic_tau_star(21, math.pi / 42))
        assert pf_optimal_period(21, 10, math.pi / 42) < upper

    def test_zeno_time_scale(self):
        """Test t_as(0.01) > 1e3 and > 10 t_as(1.4)"""
        slow, fast = tas_vs_tau(21, math.pi / 42, 10, [0.01, 1.4])
        assert slow.tau == 0.01
        assert slow.t_as > 1e3
        assert slow.t_as > 10 * fast.t_as

    def test_size_budget_table(self):
        """Test P_det growing with T and bounded by the dark-state limit"""
        table = pdet_vs_size_and_budget([11, 31], [50.0, 200.0, 2000.0])
        assert table.pdet.shape == (2, 3)
        assert np.all(np.diff(table.pdet, axis=1) >= -1e-12)
        for i in range(2):
            assert table.pdet[i, -1] <= table.pdet_infinity[i] + 1e-9
        assert table.pdet[1, 2] > table.pdet[1, 1]
        assert table.phi_values[0] == pytest.approx(math.pi / 22)

    def test_pf_period_grows_toward_bound(self):
        """Test that the t_as minimum moves up toward pi/2 with N"""
        taus = np.linspace(1.3, 1.56, 261)
        minima = []
        for N in (11, 15, 21):
            delta, phi = reference_protocol(N)
            points = tas_vs_tau(N, phi, delta, taus)
            minima.append(min(points, key=lambda p: p.t_as).tau)
        assert minima[0] < minima[1] < minima[2] < math.pi / 2
        assert minima[2] == pytest.approx(pf_optimal_period(21, 10, math.pi / 42), abs=2e-3)

    def test_reference_odd_ring_budget(self):
        """Test P_det near 0.956 at N = 21, T = 200 against a limit of 1"""
        table = pdet_vs_size_and_budget([21], [200.0, 2000.0])
        assert table.pdet_infinity[0] == pytest.approx(1.0, abs=1e-9)
        assert 0.95 < table.pdet[0, 0] < 0.96
        assert table.pdet[0, 1] > table.pdet[0, 0]

    def test_pdet_vs_tau_shape(self):
        """Test one row per ring size"""
        values = pdet_vs_tau([11, 21], [0.5, 1.0, 1.4])
        assert values.shape == (2, 3)
        assert np.all((values >= 0.0) & (values <= 1.0 + 1e-12))

    def test_optimal_period_trend(self):
        """Test tau_opt and tau_PF per (N, T)"""
        taus = np.linspace(0.1, 2.0, 20)
        points = optimal_period_trend([11], [50.0, 200.0], taus)
        assert [(p.N, p.T) for p in points] == [(11, 50.0), (11, 200.0)]
        upper = float(analytic_tau_star(11, math.pi / 22))
        for point in points:
            assert 0.1 <= point.tau_opt < upper
        assert points[0].tau_pf == points[1].tau_pf


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
