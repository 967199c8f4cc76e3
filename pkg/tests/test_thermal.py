import math

import numpy as np
import pytest

from levi_ramsey import (DomainError, FreeEvolve, Measure, MwPulse,
                         PulseSequence, ThermalSpec, cat_visibility,
                         coherent_fock, exact_thermal_check,
                         monte_carlo_fringe, overlap_visibility,
                         ramsey_oracle, ramsey_population, run_sequence,
                         sample_p_function)

RABI = 2 * math.pi * 10e6


class TestSampler:
    def test_zero_occupation_is_degenerate(self):
        betas = sample_p_function(ThermalSpec(nbar=0.0, n_samples=100, seed=1))
        assert np.all(betas == 0)

    def test_second_moment(self):
        spec = ThermalSpec(nbar=1000.0, n_samples=100000, seed=42)
        betas = sample_p_function(spec)
        mean_sq = float(np.mean(np.abs(betas) ** 2))
        sigma = spec.nbar / math.sqrt(spec.n_samples)
        assert abs(mean_sq - spec.nbar) <= 3 * sigma

    def test_first_moment_vanishes(self):
        spec = ThermalSpec(nbar=1000.0, n_samples=100000, seed=42)
        betas = sample_p_function(spec)
        sigma = math.sqrt(spec.nbar / 2 / spec.n_samples)
        assert abs(float(np.mean(betas.real))) <= 3 * sigma
        assert abs(float(np.mean(betas.imag))) <= 3 * sigma

    def test_bit_reproducible(self):
        spec = ThermalSpec(nbar=7.0, n_samples=1000, seed=123)
        assert np.array_equal(sample_p_function(spec), sample_p_function(spec))

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            ThermalSpec(nbar=-1.0, n_samples=10, seed=0)
        with pytest.raises(DomainError):
            ThermalSpec(nbar=1.0, n_samples=0, seed=0)


class TestMonteCarloFringe:
    def test_zero_variance_at_whole_period(self, rc):
        spec = ThermalSpec(nbar=1000.0, n_samples=2000, seed=9)
        mc = monte_carlo_fringe(spec, None, rc, PulseSequence.ramsey(RABI))
        assert mc.spread <= 1e-12
        expected, _, _ = ramsey_population(rc.theta, rc)
        assert np.abs(mc.p0_samples - expected).max() <= 1e-12

    def test_zero_occupation_single_effective_sample(self, rc):
        mc = monte_carlo_fringe(ThermalSpec(nbar=0.0, n_samples=10, seed=0),
                                None, rc, PulseSequence.ramsey(RABI))
        assert mc.spread == 0.0
        assert np.all(mc.p0_samples == mc.p0_samples[0])

    def test_theta_override(self, rc):
        spec = ThermalSpec(nbar=3.0, n_samples=20, seed=5)
        mc = monte_carlo_fringe(spec, math.pi / 2, rc, PulseSequence.ramsey(RABI))
        assert mc.mean == pytest.approx(1.0, abs=1e-10)

    def test_partial_periods_guarded(self, fig2):
        seq = PulseSequence((MwPulse.half_pi(RABI), FreeEvolve(periods=0.5),
                             MwPulse.half_pi(RABI), Measure()))
        with pytest.raises(DomainError):
            monte_carlo_fringe(ThermalSpec(nbar=1.0, n_samples=5, seed=1),
                               None, fig2, seq)

    def test_deterministic_given_seed(self, rc):
        spec = ThermalSpec(nbar=50.0, n_samples=500, seed=77)
        a = monte_carlo_fringe(spec, None, rc, PulseSequence.ramsey(RABI))
        b = monte_carlo_fringe(spec, None, rc, PulseSequence.ramsey(RABI))
        assert a.mean == b.mean
        assert np.array_equal(a.p0_samples, b.p0_samples)

    def test_midpoint_diagnostic_matches_quadrature(self, fig2):
        # independent oracle: Gauss-Hermite average of the per-label result
        # over the thermal P function
        nbar = 2.0
        seq = PulseSequence((MwPulse.half_pi(RABI), FreeEvolve(periods=0.5),
                             MwPulse.half_pi(RABI), Measure()))
        nodes, weights = np.polynomial.hermite.hermgauss(61)
        scale = math.sqrt(nbar)
        quad = 0.0
        for ti, wi in zip(nodes, weights):
            for tj, wj in zip(nodes, weights):
                beta = scale * complex(ti, tj)
                p0 = run_sequence(seq, beta, fig2).populations.zero
                quad += wi * wj * p0
        quad /= math.pi
        spec = ThermalSpec(nbar=nbar, n_samples=4000, seed=31)
        mc = monte_carlo_fringe(spec, None, fig2, seq, allow_partial_periods=True)
        sigma = float(np.std(mc.p0_samples)) / math.sqrt(spec.n_samples)
        assert abs(mc.mean - quad) <= 3 * sigma + 1e-12


class TestCatVisibility:
    def test_reduces_to_pure_overlap_at_zero_occupation(self, fig2):
        for frac in (0.1, 0.25, 0.5):
            t = frac * fig2.t0
            assert cat_visibility(0.0, t, fig2) == pytest.approx(
                overlap_visibility(t, fig2), rel=1e-12)

    def test_matches_quadrature_magnitude(self, fig2):
        # |thermal average of the off-diagonal spin coherence| via Gauss-Hermite
        nbar = 1.5
        t = 0.31 * fig2.t0
        seq = PulseSequence((MwPulse.half_pi(RABI), FreeEvolve(duration=t)))
        nodes, weights = np.polynomial.hermite.hermgauss(61)
        scale = math.sqrt(nbar)
        acc = 0.0 + 0.0j
        for ti, wi in zip(nodes, weights):
            for tj, wj in zip(nodes, weights):
                state = run_sequence(seq, scale * complex(ti, tj), fig2).final_state
                acc += wi * wj * state.spin_density()[0][2]
        acc /= math.pi
        assert 2.0 * abs(acc) == pytest.approx(cat_visibility(nbar, t, fig2), abs=1e-9)


class TestExactThermalCheck:
    def test_small_occupation_against_analytic(self, fig2):
        res = exact_thermal_check(2.0, fig2, PulseSequence.ramsey(RABI), 220)
        expected, _, _ = ramsey_population(0.0, fig2)
        assert res.populations.zero == pytest.approx(expected, abs=1e-6)
        assert res.motional_fidelity >= 1 - 1e-7
        assert abs(res.purity_final - res.purity_initial) <= 1e-7

    def test_zero_occupation_reduces_to_pure_case(self, fig2):
        res = exact_thermal_check(0.0, fig2, PulseSequence.ramsey(RABI), 160)
        pure = ramsey_oracle(coherent_fock(0j, 160), fig2,
                             PulseSequence.ramsey(RABI), 160)
        assert res.populations.zero == pytest.approx(pure.populations.zero, abs=1e-10)

    def test_occupation_cap(self, fig2):
        with pytest.raises(DomainError):
            exact_thermal_check(6.0, fig2, PulseSequence.ramsey(RABI), 220)

    def test_matches_monte_carlo(self, fig2):
        exact = exact_thermal_check(2.0, fig2, PulseSequence.ramsey(RABI), 220)
        mc = monte_carlo_fringe(ThermalSpec(nbar=2.0, n_samples=2000, seed=13),
                                None, fig2, PulseSequence.ramsey(RABI))
        assert abs(mc.mean - exact.populations.zero) <= 1e-6
