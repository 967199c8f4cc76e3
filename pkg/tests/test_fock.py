import cmath
import math

import numpy as np
import pytest

from levi_ramsey import (DomainError, FockDensity, PulseSequence,
                         ReducedCouplings, TruncationError, TruncationWarning,
                         coherent_fock, evolve_coherent, fidelity, propagate,
                         ramsey_oracle, required_dim, sector_hamiltonian,
                         thermal_fock)
from levi_ramsey.fock import displaced_spectrum


def wrap(angle):
    return (angle + math.pi) % (2 * math.pi) - math.pi


class TestCoherentFock:
    def test_vacuum(self):
        state = coherent_fock(0j, 32)
        assert state.amplitudes[0] == 1.0
        assert np.all(state.amplitudes[1:] == 0)

    def test_poisson_single_quantum_weight(self):
        state = coherent_fock(1.0, 32)
        assert abs(state.amplitudes[1]) ** 2 == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_mean_occupation(self):
        rng = np.random.default_rng(8)
        for _ in range(6):
            beta = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if abs(beta) > 3:
                beta *= 3 / abs(beta)
            state = coherent_fock(beta, 64)
            assert state.mean_n() == pytest.approx(abs(beta) ** 2, abs=1e-10)

    def test_norm_and_tail(self):
        state = coherent_fock(2.5, 64)
        assert state.norm() == pytest.approx(1.0, abs=1e-12)
        assert state.tail_weight() < 1e-12

    def test_dim_heuristic_enforced(self):
        with pytest.raises(DomainError):
            coherent_fock(3.0, required_dim(3.0) - 1)

    def test_tail_tolerance_enforced(self):
        with pytest.raises(TruncationError):
            coherent_fock(3.0, required_dim(3.0), tail_tol=1e-60)


class TestThermalFock:
    def test_vacuum_projector(self):
        rho = thermal_fock(0.0, 16)
        assert rho.matrix[0, 0] == 1.0
        assert np.abs(rho.matrix).sum() == 1.0

    def test_geometric_ground_weight(self):
        rho = thermal_fock(2.0, 200)
        assert rho.matrix[0, 0].real == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_mean_occupation(self):
        rho = thermal_fock(2.0, 200)
        assert rho.mean_n() == pytest.approx(2.0, abs=1e-9)

    def test_validates(self):
        thermal_fock(2.0, 200).validate()

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            thermal_fock(2.0, 20)

    def test_density_validation_catches_bad_matrices(self):
        bad = FockDensity(np.array([[0.7, 0.1j], [0.2j, 0.3]]))
        with pytest.raises(DomainError):
            bad.validate()


class TestSectorHamiltonian:
    def test_bare_oscillator(self):
        rc = ReducedCouplings.from_dimensionless(l=0.0, dl=0.0, d=0.0)
        ham = sector_hamiltonian(0, rc, 8)
        assert np.array_equal(ham.matrix(), np.diag(np.arange(8.0)))

    def test_matrix_symmetric_exactly(self, fig2):
        mat = sector_hamiltonian(1, fig2, 64).matrix()
        assert np.array_equal(mat, mat.T)

    def test_ground_energy_displacement_identity(self, fig2):
        ham = sector_hamiltonian(1, fig2, 128)
        lowest = np.linalg.eigvalsh(ham.matrix())[0]
        assert lowest == pytest.approx(-1.21, abs=1e-6)

    def test_displaced_spectrum_law(self):
        for u in (0.4, 1.1, -0.9, 2.0):
            w = displaced_spectrum(u, 160)
            n = np.arange(80)
            assert np.abs(w[:80] - (n - u * u)).max() <= 1e-6

    def test_anisotropy_on_diagonal(self, fig2_aniso):
        ham = sector_hamiltonian(-1, fig2_aniso, 16)
        assert ham.diagonal[0] == pytest.approx(fig2_aniso.d)


class TestPropagate:
    def test_zero_time_is_identity(self, fig2):
        state = coherent_fock(0.8 + 0.2j, 96)
        out = propagate(state, 1, 0.0, fig2)
        assert np.abs(out.amplitudes - state.amplitudes).max() <= 1e-12

    def test_unitarity_on_random_inputs(self, fig2_aniso):
        rng = np.random.default_rng(12)
        for _ in range(100):
            beta = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            t = rng.uniform(0, fig2_aniso.t0)
            out = propagate(coherent_fock(beta, 160), int(rng.choice([-1, 0, 1])),
                            t, fig2_aniso)
            assert abs(out.norm() - 1.0) <= 1e-10

    def test_return_and_global_phase_at_whole_period(self, fig2_aniso):
        beta = 0j
        state = coherent_fock(beta, 160)
        out = propagate(state, 1, fig2_aniso.t0, fig2_aniso)
        ov = state.overlap(out)
        assert abs(ov) ** 2 >= 1 - 1e-8
        u = fig2_aniso.u(1)
        expected = (u * u - fig2_aniso.d) * 2 * math.pi
        assert abs(wrap(cmath.phase(ov) - expected)) <= 1e-9

    def test_tail_warning_when_underresolved(self):
        rc = ReducedCouplings.from_dimensionless(l=3.0, dl=0.0)
        state = coherent_fock(3.0, 62)
        with pytest.warns(TruncationWarning):
            propagate(state, 1, 0.25 * rc.t0, rc)


class TestClosedFormEquivalence:
    def test_declared_grid(self):
        # |beta| <= 2, |u| <= 2, nine times across one period, N = 160
        dim = 160
        betas = [0j, 2.0 + 0j, -1.2 + 0.9j, 0.3 - 1.7j]
        pairs = [(0.5, 0.05), (0.9, 0.1), (0.05, -0.55), (0.25, 0.0)]
        taus = [2 * math.pi * k / 8 for k in range(9)]
        worst_inf, worst_ph = 0.0, 0.0
        for l, dl in pairs:
            rc = ReducedCouplings.from_dimensionless(l=l, dl=dl, d=0.3)
            for beta in betas:
                for s in (-1, 0, 1):
                    assert abs(rc.u(s)) <= 2.0
                    for tau in taus:
                        t = tau / rc.omega_z
                        psi = propagate(coherent_fock(beta, dim), s, t, rc)
                        phase, label = evolve_coherent(beta, s, t, rc)
                        ov = coherent_fock(label, dim).overlap(psi)
                        worst_inf = max(worst_inf, 1 - abs(ov) ** 2)
                        worst_ph = max(worst_ph, abs(wrap(cmath.phase(ov) - phase)))
        assert worst_inf <= 1e-8
        assert worst_ph <= 1e-9

    def test_relative_phase_sign_matches_closed_form(self, fig2):
        # the oracle fixes the sign convention of the accumulated phase
        beta = 0.4 + 0.2j
        dim = 160
        phases = {}
        for s in (1, -1):
            psi = propagate(coherent_fock(beta, dim), s, fig2.t0, fig2)
            phases[s] = cmath.phase(coherent_fock(beta, dim).overlap(psi))
        oracle_rel = wrap(phases[-1] - phases[1])
        expected = wrap(-16.0 * fig2.l * fig2.dl0 * 2 * math.pi)
        assert abs(wrap(oracle_rel - expected)) <= 1e-9


class TestRamseyOracle:
    rabi = 5e6

    def test_no_tilt_full_return(self):
        rc = ReducedCouplings.from_dimensionless(l=0.5, dl=0.0, d=0.3)
        res = ramsey_oracle(coherent_fock(0.7, 160), rc,
                            PulseSequence.ramsey(self.rabi), 160)
        assert res.populations.zero == pytest.approx(1.0, abs=1e-9)

    def test_pi_phase_configuration_empties_p0(self):
        l = 6.628200879869512e-3
        rc = ReducedCouplings.from_dimensionless(l=l, dl=1.0 / (32.0 * l))
        dim = 560
        res = ramsey_oracle(coherent_fock(0j, dim), rc,
                            PulseSequence.ramsey(self.rabi), dim)
        assert res.populations.zero <= 1e-6

    def test_thermal_equals_pure_result(self, fig2):
        seq = PulseSequence.ramsey(self.rabi)
        pure = ramsey_oracle(coherent_fock(0j, 220), fig2, seq, 220)
        thermal = ramsey_oracle(thermal_fock(2.0, 220), fig2, seq, 220)
        assert thermal.populations.zero == pytest.approx(pure.populations.zero,
                                                         abs=1e-6)

    def test_population_sum(self, fig2_aniso):
        res = ramsey_oracle(coherent_fock(0.5, 160), fig2_aniso,
                            PulseSequence.ramsey(self.rabi), 160)
        assert sum(res.populations) == pytest.approx(1.0, abs=1e-10)

    def test_truncation_monotonicity(self, fig2_aniso):
        p0 = {}
        for dim in (128, 192):
            res = ramsey_oracle(coherent_fock(0.4 + 0.3j, dim), fig2_aniso,
                                PulseSequence.ramsey(self.rabi), dim)
            p0[dim] = res.populations.zero
        assert abs(p0[128] - p0[192]) <= 1e-9

    def test_rejects_undersized_dim(self, fig2):
        with pytest.raises(DomainError):
            ramsey_oracle(coherent_fock(0j, 64), fig2,
                          PulseSequence.ramsey(self.rabi), 32)


class TestFidelity:
    def test_identical_states(self):
        rho = thermal_fock(1.5, 120)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_projector_limit(self):
        a = np.zeros((4, 4), complex)
        b = np.zeros((4, 4), complex)
        a[0, 0] = 1.0
        b[1, 1] = 1.0
        assert fidelity(FockDensity(a), FockDensity(b)) == pytest.approx(0.0, abs=1e-12)

    def test_pure_state_overlap_squared(self):
        va = coherent_fock(0.5, 64).amplitudes
        vb = coherent_fock(-0.3 + 0.2j, 64).amplitudes
        rho = FockDensity(np.outer(va, va.conj()))
        sig = FockDensity(np.outer(vb, vb.conj()))
        # sqrt of eigenvalue noise bounds the accuracy of the Uhlmann route
        assert fidelity(rho, sig) == pytest.approx(abs(np.vdot(va, vb)) ** 2, abs=1e-7)
