"""Acceptance gate: one test per headline claim, at pinned tolerances.

Each test prints a single machine-greppable line
``ACCEPTANCE <name>: PASS|FAIL (<detail>)`` before asserting, so a plain
``pytest -s tests/test_acceptance.py`` doubles as the acceptance report.
"""

import cmath
import json
import math
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest

from levi_ramsey import (ExperimentConfig, PulseSequence, ReducedCouplings,
                         ThermalSpec, coherent_fock, contrast_model,
                         derive_couplings, derive_mass, evolve_coherent,
                         exact_thermal_check, monte_carlo_fringe, propagate,
                         ramsey_oracle, ramsey_population, run_sequence,
                         run_suite, scattering_rate, thermal_occupation)

RABI = 2 * math.pi * 10e6


def wrap(angle):
    return (angle + math.pi) % (2 * math.pi) - math.pi


def report(name, ok, detail):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def test_mass_design_point():
    mass = derive_mass(100e-9, 3000.0)
    rel = abs(mass - 1.25e-17) / 1.25e-17
    report("mass", rel <= 0.01, f"m = {mass:.5g} kg, {100 * rel:.2f}% from 1.25e-17")


def test_scattering_rate():
    config = ExperimentConfig()
    ratio = scattering_rate(config) / config.omega_z
    rel = abs(ratio - 5e-3) / 5e-3
    ok = rel <= 0.10 and abs(ratio - 4.7248e-3) / 4.7248e-3 < 1e-4
    report("scattering", ok, f"gamma_sc/omega_z = {ratio:.4g}, {100 * rel:.1f}% from 5e-3")


def test_phonon_number():
    nbar = thermal_occupation(1e-3, 1e5)
    rel = abs(nbar - 1000.0) / 1000.0
    ok = rel <= 0.50 and abs(nbar - 1308.70) / 1308.70 < 1e-4
    report("phonon_number", ok, f"nbar(1 mK) = {nbar:.1f}, {100 * rel:.0f}% from 1000")


def test_design_point():
    der = derive_couplings(ExperimentConfig())
    sep_pm = der.separation_xzpf_m * 1e12
    rel = abs(sep_pm - 0.15) / 0.15
    ok = (10.0 <= der.K <= 13.0 and 0.025 <= der.well_separation <= 0.03
          and rel <= 0.25)
    report("design_point", ok,
           f"K = {der.K:.3f}, separation = {der.well_separation:.4f} "
           f"({sep_pm:.3f} pm vs 0.15 pm, {100 * rel:.0f}%)")


def test_closed_form_oracle_equivalence():
    dim = 160
    betas = [0j, 2.0 + 0j, -1.2 + 0.9j, 0.3 - 1.7j]
    pairs = [(0.5, 0.05), (0.9, 0.1), (0.05, -0.55), (0.25, 0.0)]
    taus = [2 * math.pi * k / 8 for k in range(9)]
    worst_inf, worst_ph = 0.0, 0.0
    for l, dl in pairs:
        rc = ReducedCouplings.from_dimensionless(l=l, dl=dl, d=0.3)
        for beta in betas:
            for s in (-1, 0, 1):
                for tau in taus:
                    t = tau / rc.omega_z
                    psi = propagate(coherent_fock(beta, dim), s, t, rc)
                    phase, label = evolve_coherent(beta, s, t, rc)
                    ov = coherent_fock(label, dim).overlap(psi)
                    worst_inf = max(worst_inf, 1 - abs(ov) ** 2)
                    worst_ph = max(worst_ph, abs(wrap(cmath.phase(ov) - phase)))
    ok = worst_inf <= 1e-8 and worst_ph <= 1e-9
    report("oracle_equivalence", ok,
           f"max infidelity {worst_inf:.2e} <= 1e-8, max phase diff {worst_ph:.2e} <= 1e-9")


def test_return_at_whole_period():
    rc = ReducedCouplings.from_dimensionless(l=0.5, dl=0.05, d=0.3)
    rng = np.random.default_rng(19)
    worst = 0.0
    for _ in range(20):
        beta = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        s = int(rng.choice([-1, 0, 1]))
        psi = propagate(coherent_fock(beta, 160), s, rc.t0, rc)
        worst = max(worst, 1 - abs(coherent_fock(beta, 160).overlap(psi)) ** 2)
    report("return_at_t0", worst <= 1e-8,
           f"max infidelity with the initial state {worst:.2e} <= 1e-8")


def test_gravitational_phase():
    config = ExperimentConfig()
    rc = ReducedCouplings.from_config(config)

    def engine_rel(couplings):
        ph_p, _ = evolve_coherent(0.3j, 1, couplings.t0, couplings)
        ph_m, _ = evolve_coherent(0.3j, -1, couplings.t0, couplings)
        return wrap(ph_m - ph_p)

    der = derive_couplings(config)
    expected = -der.delta_phi_grav  # engine sign convention, magnitude of Eq. form
    dev_mag = abs(wrap(engine_rel(rc) - expected))
    # odd under orientation reversal
    rc_flip = ReducedCouplings.from_config(replace(config, theta=math.pi - config.theta))
    dev_odd = abs(wrap(engine_rel(rc_flip) + engine_rel(rc)))
    # sign agreement with the oracle at representable couplings
    fig2 = ReducedCouplings.from_dimensionless(l=0.5, dl=0.05)
    phases = {}
    for s in (1, -1):
        psi = propagate(coherent_fock(0.2j, 160), s, fig2.t0, fig2)
        phases[s] = cmath.phase(coherent_fock(0.2j, 160).overlap(psi))
    dev_sign = abs(wrap(wrap(phases[-1] - phases[1]) - engine_rel(fig2)))
    ok = dev_mag <= 1e-9 and dev_odd <= 1e-9 and dev_sign <= 1e-9
    report("gravitational_phase", ok,
           f"magnitude dev {dev_mag:.2e}, oddness dev {dev_odd:.2e}, "
           f"oracle sign dev {dev_sign:.2e}, all <= 1e-9")


def test_ramsey_fringe():
    # K = 10 exactly: l * dl0 = 10 / (16 pi)
    rc = ReducedCouplings.from_dimensionless(l=0.5, dl=10.0 / (16 * math.pi * 0.5))
    worst = 0.0
    thetas = np.linspace(math.pi / 2 - math.pi / 20, math.pi / 2, 101)
    for theta in thetas:
        res = run_sequence(PulseSequence.ramsey(RABI, theta=float(theta)), 0j, rc)
        expected, _, _ = ramsey_population(float(theta), rc)
        worst = max(worst, abs(res.populations.zero - expected))
    left = run_sequence(PulseSequence.ramsey(RABI, theta=float(thetas[0])), 0j, rc)
    right = run_sequence(PulseSequence.ramsey(RABI, theta=float(thetas[-1])), 0j, rc)
    ok = (worst <= 1e-10 and left.populations.zero <= 1e-3
          and right.populations.zero >= 1 - 1e-12)
    report("ramsey_fringe", ok,
           f"max |P0 - cos^2| = {worst:.2e} <= 1e-10; "
           f"K=10 traversal {left.populations.zero:.2e} -> {right.populations.zero:.12f}")


def test_thermal_immunity():
    rc = ReducedCouplings.from_config(ExperimentConfig())
    mc = monte_carlo_fringe(ThermalSpec(nbar=1000.0, n_samples=10000, seed=7),
                            None, rc, PulseSequence.ramsey(RABI))
    fig2 = ReducedCouplings.from_dimensionless(l=0.5, dl=0.05)
    exact = exact_thermal_check(2.0, fig2, PulseSequence.ramsey(RABI), 220)
    analytic, _, _ = ramsey_population(0.0, fig2)
    dev = abs(exact.populations.zero - analytic)
    ok = (mc.spread <= 1e-12 and dev <= 1e-6
          and exact.motional_fidelity >= 1 - 1e-7)
    report("thermal_immunity", ok,
           f"MC spread {mc.spread:.2e} <= 1e-12 (10^4 samples, nbar = 1000); "
           f"exact nbar=2 dev {dev:.2e} <= 1e-6; "
           f"return fidelity 1 - {1 - exact.motional_fidelity:.2e}")


def test_echo_identities():
    from levi_ramsey import EchoFlip, FreeEvolve, MwPulse, OrientationFlip
    rc = ReducedCouplings.from_config(ExperimentConfig())

    def rel_after(*steps):
        seq = PulseSequence((MwPulse.half_pi(RABI),) + steps)
        return run_sequence(seq, 0j, rc).final_state.relative_phase()

    plain = rel_after(FreeEvolve(periods=1.0), EchoFlip(), FreeEvolve(periods=1.0))
    flip = rel_after(FreeEvolve(periods=1.0), EchoFlip(), OrientationFlip(),
                     FreeEvolve(periods=1.0))
    dphi = derive_couplings(ExperimentConfig()).delta_phi_grav
    dev_cancel = abs(wrap(plain))
    # after the swap, the sector-resolved doubled phase is +2 * dphi
    dev_double = abs(wrap(flip - 2.0 * dphi))
    ok = dev_cancel <= 1e-9 and dev_double <= 1e-9
    report("echo_identities", ok,
           f"cancellation residue {dev_cancel:.2e}; doubling dev {dev_double:.2e}; "
           f"both <= 1e-9")


def test_contrast():
    config = ExperimentConfig()
    c = contrast_model(config.T2, T2=config.T2)
    dev_c = abs(c - math.exp(-1.0))
    lo, hi = 0.5 * (1 - c), 0.5 * (1 + c)
    dev_band = max(abs(lo - 0.316), abs(hi - 0.684))
    ok = dev_c <= 1e-12 and dev_band <= 1e-3
    report("contrast", ok,
           f"C(T2) - 1/e = {dev_c:.2e} <= 1e-12; band [{lo:.4f}, {hi:.4f}] "
           f"within 1e-3 of [0.316, 0.684]")


def test_anisotropy_independence():
    config = ExperimentConfig()
    rc = ReducedCouplings.from_config(config)
    worst = 0.0
    ref = run_sequence(PulseSequence.ramsey(RABI), 0j, rc).populations
    for d_hz in np.linspace(0.0, 5e9, 6):
        rc_d = replace(rc, d=2 * math.pi * float(d_hz) / rc.omega_z)
        pops = run_sequence(PulseSequence.ramsey(RABI), 0j, rc_d).populations
        worst = max(worst, max(abs(a - b) for a, b in zip(pops, ref)))
    fig2 = ReducedCouplings.from_dimensionless(l=0.5, dl=0.05)
    oref = ramsey_oracle(coherent_fock(0.3, 160), fig2,
                         PulseSequence.ramsey(RABI), 160).populations
    for d in (0.5, 5.0, 2 * math.pi * 5e9 / fig2.omega_z):
        pops = ramsey_oracle(coherent_fock(0.3, 160), replace(fig2, d=d),
                             PulseSequence.ramsey(RABI), 160).populations
        worst = max(worst, max(abs(a - b) for a, b in zip(pops, oref)))
    report("anisotropy_independence", worst <= 1e-10,
           f"max population shift across the D sweep {worst:.2e} <= 1e-10")


def test_negative_control(tmp_path):
    good = subprocess.run([sys.executable, "-m", "levi_ramsey", "verify",
                           "--suite", "quick", "--report", "good.json"],
                          cwd=tmp_path, capture_output=True, text=True)
    bad = subprocess.run([sys.executable, "-m", "levi_ramsey", "verify",
                          "--inject-lambda-sign-flip", "--report", "bad.json"],
                         cwd=tmp_path, capture_output=True, text=True)
    failed = [c["name"] for c in
              json.loads((tmp_path / "bad.json").read_text())["checks"]
              if not c["passed"]]
    ok = (good.returncode == 0 and bad.returncode == 1
          and "phase_sign_oracle_agreement" in failed)
    report("negative_control", ok,
           f"clean exit {good.returncode}, corrupted exit {bad.returncode}, "
           f"caught by {failed}")
