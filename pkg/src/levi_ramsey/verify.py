"""Self-verification suites: structural invariants plus engine-vs-oracle.

``run_suite`` executes a battery of checks and reports one measured deviation
per invariant.  The ``quick`` suite covers the constants identities, field
consistency, closed-form/oracle agreement on a reduced grid, phase signs,
whole-period return, echo identities, anisotropy independence, and contrast
values; ``full`` widens the grid and adds the exact thermal density run, the
thermal Monte Carlo zero-variance property, truncation monotonicity, and
randomized protocol equivalence.

``engine_lambda_sign=-1`` deliberately corrupts the closed-form engine (never
the oracle) as a negative control, demonstrating that a wrong coupling sign
is caught by the phase-sign comparison.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .constants import (CODATA, ConfigDocument, ExperimentConfig,
                        ReducedCouplings, derive_couplings, derive_dipole,
                        field_expansion)
from .dynamics import evolve_coherent
from .fock import coherent_fock, propagate, ramsey_oracle
from .ramsey import contrast_model, ramsey_population, run_sequence
from .sequences import (EchoFlip, FreeEvolve, Measure, MwPulse,
                        OrientationFlip, PulseSequence, half_pi_duration,
                        mw_unitary)
from .thermal import ThermalSpec, exact_thermal_check, monte_carlo_fringe

# standard small-coupling set for oracle comparisons (number-basis friendly)
_ORACLE_COUPLINGS = ReducedCouplings.from_dimensionless(l=0.5, dl=0.05, d=0.3)
_GRID_DIM = 160


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "measured": self.measured,
                "tolerance": self.tolerance, "detail": self.detail}


@dataclass(frozen=True)
class VerifyReport:
    suite: str
    results: tuple[CheckResult, ...]
    runtime_s: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed,
                "runtime_s": self.runtime_s,
                "checks": [r.to_dict() for r in self.results]}


def _check(name: str, measured: float, tolerance: float, detail: str = "") -> CheckResult:
    return CheckResult(name, bool(measured <= tolerance), float(measured),
                       float(tolerance), detail)


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def _constants_checks(config: ExperimentConfig) -> list[CheckResult]:
    out = []
    der = derive_couplings(config)
    lhs = 16.0 * der.lambda_ * der.delta_lambda * der.t0 / (CODATA.hbar ** 2 * config.omega_z)
    out.append(_check("grav_phase_identity", abs(der.delta_phi_grav - lhs), 1e-12,
                      "2 K cos(theta) against the direct product form"))
    der_f = derive_couplings(replace(config, theta=math.pi - config.theta))
    out.append(_check("grav_phase_odd_in_theta",
                      abs(der_f.delta_phi_grav + der.delta_phi_grav),
                      1e-9 * max(1.0, abs(der.delta_phi_grav)),
                      "delta_phi_grav flips sign under theta -> pi - theta"))
    der2 = derive_couplings(replace(config, omega_z=2.0 * config.omega_z,
                                    omega_x=max(config.omega_x, 2 * config.omega_z),
                                    omega_y=max(config.omega_y, 2 * config.omega_z)))
    dev = max(abs(der2.lambda_ / der.lambda_ - 2.0 ** -0.5),
              abs(der2.delta_lambda / der.delta_lambda - 2.0 ** -0.5)
              if der.delta_lambda != 0 else 0.0,
              abs(der2.K / der.K - 2.0 ** -3))
    out.append(_check("scale_covariance", dev, 1e-12,
                      "lambda, delta_lambda ~ omega^-1/2; K ~ omega^-3"))
    dipole = derive_dipole(config.magnetization, config.magnet_radius)
    rng = np.random.default_rng(11)
    h = 1e-9
    worst = 0.0
    for _ in range(6):
        p = rng.uniform(-50e-9, 50e-9, size=3)
        grad = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            bp = np.array(field_expansion(dipole, config.magnet_offset, tuple(p + e)))
            bm = np.array(field_expansion(dipole, config.magnet_offset, tuple(p - e)))
            grad[:, j] = (bp - bm) / (2 * h)
        scale = max(1.0, float(np.abs(grad).max()))
        div = abs(grad[0, 0] + grad[1, 1] + grad[2, 2]) / scale
        curl = max(abs(grad[2, 1] - grad[1, 2]), abs(grad[0, 2] - grad[2, 0]),
                   abs(grad[1, 0] - grad[0, 1])) / scale
        worst = max(worst, div, curl)
    out.append(_check("field_divergence_curl_free", worst, 1e-6,
                      "normalized finite-difference divergence/curl of the expansion"))
    return out


def _mw_checks(config: ExperimentConfig) -> list[CheckResult]:
    tp = half_pi_duration(config.rabi_Omega)
    u = mw_unitary(tp, config.rabi_Omega)
    unit_dev = float(np.abs(u @ u.conj().T - np.eye(3)).max())
    target = np.array([-1j / math.sqrt(2), 0.0, -1j / math.sqrt(2)])
    prep_dev = float(np.abs(u @ np.array([0, 1, 0]) - target).max())
    return [_check("mw_unitarity", unit_dev, 1e-14, "U U^dag deviation from identity"),
            _check("mw_equal_superposition", prep_dev, 1e-12,
                    "pulse of duration t_p maps |0> to the equal +1/-1 superposition")]


def _oracle_point(beta: complex, s_z: int, tau: float, engine: ReducedCouplings,
                  oracle: ReducedCouplings, dim: int) -> tuple[float, float]:
    """(infidelity, |phase diff|) between closed form and the Fock propagator."""
    t = tau / oracle.omega_z
    psi = propagate(coherent_fock(beta, dim), s_z, t, oracle)
    phase, label = evolve_coherent(beta, s_z, t, engine)
    ov = coherent_fock(label, dim).overlap(psi)
    return (max(0.0, 1.0 - abs(ov) ** 2), abs(_wrap(cmath.phase(ov) - phase)))


def _grid_checks(sign: float, full: bool) -> list[CheckResult]:
    betas = [0j, 2.0 + 0j, -1.2 + 0.9j, 0.3 - 1.7j] if full else [0j, 2.0 + 0j, 0.3 - 1.7j]
    u_pairs = [(0.5, 0.05), (0.9, 0.1), (0.05, -0.55), (0.25, 0.0)] if full \
        else [(0.5, 0.05), (0.05, -0.55)]
    n_t = 9 if full else 5
    taus = [2.0 * math.pi * k / (n_t - 1) for k in range(n_t)]
    worst_inf, worst_ph = 0.0, 0.0
    for l, dl in u_pairs:
        oracle_c = ReducedCouplings.from_dimensionless(l=l, dl=dl, d=0.3)
        engine_c = replace(oracle_c, l=sign * oracle_c.l)
        for beta in betas:
            for s in (-1, 0, 1):
                for tau in taus:
                    inf, dph = _oracle_point(beta, s, tau, engine_c, oracle_c, _GRID_DIM)
                    worst_inf = max(worst_inf, inf)
                    worst_ph = max(worst_ph, dph)
    label = "full" if full else "quick"
    return [_check(f"oracle_grid_infidelity_{label}", worst_inf, 1e-8,
                   "max 1 - |<oracle|closed form>|^2 over the (beta, u, t) grid"),
            _check(f"oracle_grid_phase_{label}", worst_ph, 1e-9,
                   "max closed-form vs oracle phase difference in rad")]


def _phase_sign_check(sign: float) -> CheckResult:
    oracle_c = _ORACLE_COUPLINGS
    engine_c = replace(oracle_c, l=sign * oracle_c.l)
    beta = 0.4 + 0.2j
    phases = {}
    for s in (1, -1):
        psi = propagate(coherent_fock(beta, _GRID_DIM), s, oracle_c.t0, oracle_c)
        phases[s] = cmath.phase(coherent_fock(beta, _GRID_DIM).overlap(psi))
    oracle_rel = _wrap(phases[-1] - phases[1])
    ph_p, _ = evolve_coherent(beta, 1, engine_c.t0, engine_c)
    ph_m, _ = evolve_coherent(beta, -1, engine_c.t0, engine_c)
    engine_rel = _wrap(ph_m - ph_p)
    return _check("phase_sign_oracle_agreement", abs(_wrap(engine_rel - oracle_rel)), 1e-9,
                  f"signed relative phase over one period: engine {engine_rel:+.6f}, "
                  f"oracle {oracle_rel:+.6f} rad")


def _return_at_t0_check() -> CheckResult:
    rng = np.random.default_rng(5)
    c = _ORACLE_COUPLINGS
    worst = 0.0
    for _ in range(20):
        beta = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        s = int(rng.choice([-1, 0, 1]))
        psi = propagate(coherent_fock(beta, _GRID_DIM), s, c.t0, c)
        worst = max(worst, 1.0 - abs(coherent_fock(beta, _GRID_DIM).overlap(psi)) ** 2)
    return _check("return_at_whole_period", worst, 1e-8,
                  "oracle infidelity with the initial coherent state at t = t0")


def _relative_phase_after(steps: tuple, rc: ReducedCouplings, rabi: float) -> float:
    seq = PulseSequence((MwPulse.half_pi(rabi),) + steps)
    state = run_sequence(seq, 0j, rc).final_state
    return state.relative_phase()


def _engine_checks(rc: ReducedCouplings, config: ExperimentConfig) -> list[CheckResult]:
    out = []
    rabi = config.rabi_Omega
    # run_sequence against the analytic fringe, and the population sum rule
    worst, worst_sum = 0.0, 0.0
    for th in np.linspace(math.pi / 2 - math.pi / 20, math.pi / 2, 21):
        analytic, _, _ = ramsey_population(float(th), rc)
        pops = run_sequence(PulseSequence.ramsey(rabi, theta=float(th)), 0j, rc).populations
        worst = max(worst, abs(pops.zero - analytic))
        worst_sum = max(worst_sum, abs(sum(pops) - 1.0))
    out.append(_check("ramsey_fringe_engine_vs_analytic", worst, 1e-10,
                      "run_sequence P0 against (1 + cos dphi)/2 across theta"))
    out.append(_check("population_sum_rule", worst_sum, 1e-12, "P+ + P0 + P- = 1"))
    # gravitational phase magnitude against the product formula
    base = _relative_phase_after((FreeEvolve(periods=1.0),), rc, rabi)
    expect = -16.0 * rc.l * rc.dl(rc.theta) * 2.0 * math.pi
    out.append(_check("grav_phase_engine_magnitude", abs(_wrap(base - expect)), 1e-9,
                      "relative -1 vs +1 phase after one period vs the closed formula"))
    # echo identities
    plain = _relative_phase_after((FreeEvolve(periods=1.0), EchoFlip(),
                                   FreeEvolve(periods=1.0)), rc, rabi)
    out.append(_check("echo_phase_cancellation", abs(_wrap(plain)), 1e-9,
                      "echo without orientation flip cancels the accumulated phase"))
    # the echo swap reassigns the paths to sectors, so the sector-resolved
    # relative phase doubles in magnitude with the opposite sign: -2 * base
    doubled = _relative_phase_after((FreeEvolve(periods=1.0), EchoFlip(), OrientationFlip(),
                                     FreeEvolve(periods=1.0)), rc, rabi)
    out.append(_check("echo_phase_doubling", abs(_wrap(doubled + 2.0 * base)), 1e-9,
                      "echo with orientation flip doubles the accumulated phase"))
    # populations do not move as the anisotropy sweeps its physical range
    ref = None
    worst = 0.0
    for d in (0.0, 2 * math.pi * 2.87e9 / rc.omega_z, 2 * math.pi * 5e9 / rc.omega_z):
        pops = run_sequence(PulseSequence.ramsey(rabi), 0j, replace(rc, d=d)).populations
        if ref is None:
            ref = pops
        worst = max(worst, max(abs(a - b) for a, b in zip(pops, ref)))
    out.append(_check("anisotropy_independence_engine", worst, 1e-10,
                      "populations as D sweeps 0 .. 2 pi x 5 GHz"))
    # beta-independence of whole-period populations
    rng = np.random.default_rng(23)
    ref = run_sequence(PulseSequence.ramsey(rabi), 0j, rc).populations
    worst = 0.0
    for _ in range(20):
        beta = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        pops = run_sequence(PulseSequence.ramsey(rabi), beta, rc).populations
        worst = max(worst, max(abs(a - b) for a, b in zip(pops, ref)))
    out.append(_check("beta_independence_at_t0", worst, 1e-12,
                      "whole-period populations for random initial labels"))
    # norm preservation through a protocol with intermediate-time segments
    worst = 0.0
    for _ in range(10):
        beta = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        seq = PulseSequence((MwPulse.half_pi(rabi), FreeEvolve(periods=0.37),
                             MwPulse(0.3 / rabi, rabi), FreeEvolve(periods=0.63)))
        worst = max(worst, abs(run_sequence(seq, beta, rc).norm - 1.0))
    out.append(_check("norm_preservation", worst, 1e-12,
                      "hybrid-state norm through pulses and partial periods"))
    return out


def _contrast_checks(config: ExperimentConfig) -> list[CheckResult]:
    c = contrast_model(config.T2, T2=config.T2)
    out = [_check("contrast_one_over_e", abs(c - math.exp(-1.0)), 1e-12,
                  "C(t_free = T2) with scattering disabled")]
    lo, hi = 0.5 * (1 - c), 0.5 * (1 + c)
    dev = max(abs(lo - 0.5 * (1 - math.exp(-1))), abs(hi - 0.5 * (1 + math.exp(-1))))
    out.append(_check("contrast_fringe_band", dev, 1e-3,
                      "fringe band edges (1 +- 1/e)/2 at C = 1/e"))
    out.append(_check("contrast_at_zero_time", abs(contrast_model(0.0, T2=config.T2,
                                                                  gamma_max=1.0) - 1.0),
                      0.0, "C(0) = 1"))
    return out


def _oracle_protocol_checks(sign: float) -> list[CheckResult]:
    out = []
    rc = _ORACLE_COUPLINGS
    rabi = 50.0 * rc.omega_z  # irrelevant during idealized pulses, just well-formed
    # theta = pi/2 means no gravitational tilt: P0 must return to 1
    rc_flat = replace(rc, dl0=0.0)
    res = ramsey_oracle(coherent_fock(0.7 + 0.1j, _GRID_DIM), rc_flat,
                        PulseSequence.ramsey(rabi), _GRID_DIM)
    out.append(_check("oracle_flat_tilt_p0", abs(res.populations.zero - 1.0), 1e-9,
                      "oracle P0 = 1 when the gravitational coupling vanishes"))
    # engine and oracle agree on full protocols, including echo variants
    seqs = [PulseSequence.ramsey(rabi),
            PulseSequence.spin_echo(rabi, orientation_flip=False),
            PulseSequence.spin_echo(rabi, orientation_flip=True)]
    engine_rc = replace(rc, l=sign * rc.l)
    worst = 0.0
    for seq in seqs:
        oracle_pops = ramsey_oracle(coherent_fock(0.5 - 0.4j, _GRID_DIM), rc, seq,
                                    _GRID_DIM).populations
        engine_pops = run_sequence(seq, 0.5 - 0.4j, engine_rc).populations
        worst = max(worst, max(abs(a - b) for a, b in zip(oracle_pops, engine_pops)))
    out.append(_check("protocol_engine_vs_oracle", worst, 1e-8,
                      "populations for plain, echo, and flipped-echo protocols"))
    # anisotropy independence on the oracle side
    ref, worst = None, 0.0
    for d in (0.0, 0.5, 5.0):
        pops = ramsey_oracle(coherent_fock(0.3, _GRID_DIM), replace(rc, d=d),
                             PulseSequence.ramsey(rabi), _GRID_DIM).populations
        if ref is None:
            ref = pops
        worst = max(worst, max(abs(a - b) for a, b in zip(pops, ref)))
    out.append(_check("anisotropy_independence_oracle", worst, 1e-10,
                      "oracle populations as the dimensionless anisotropy sweeps"))
    return out


def _random_sequence_checks(rng_seed: int = 37) -> list[CheckResult]:
    from .fock import required_dim
    rng = np.random.default_rng(rng_seed)
    rc = ReducedCouplings.from_dimensionless(l=0.3, dl=0.05, d=0.3)
    rabi = 80.0 * rc.omega_z
    u_max = 2.0 * (rc.l + abs(rc.dl0))
    worst = 0.0
    for _ in range(6):
        steps = []
        n_free = 0
        for _ in range(int(rng.integers(2, 7))):
            kind = rng.integers(0, 4)
            if kind == 0:
                steps.append(MwPulse(float(rng.uniform(0, 1)) / rabi, rabi))
            elif kind == 1:
                steps.append(FreeEvolve(periods=float(rng.uniform(0, 1)),
                                        theta=float(rng.uniform(0, math.pi))))
                n_free += 1
            elif kind == 2:
                steps.append(EchoFlip())
            else:
                steps.append(OrientationFlip())
        seq = PulseSequence(tuple(steps) + (Measure(),))
        beta = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        # labels random-walk by at most 2 u_max per free segment
        dim = max(_GRID_DIM, required_dim(abs(beta) + 2.0 * u_max * (n_free + 1)))
        oracle_pops = ramsey_oracle(coherent_fock(beta, dim), rc, seq, dim).populations
        engine_pops = run_sequence(seq, beta, rc).populations
        worst = max(worst, max(abs(a - b) for a, b in zip(oracle_pops, engine_pops)))
    return [_check("random_sequence_equivalence", worst, 1e-8,
                   "engine vs oracle populations over random <= 6-step protocols")]


def _thermal_checks(rc_config: ReducedCouplings, rabi: float) -> list[CheckResult]:
    out = []
    rc = _ORACLE_COUPLINGS
    seq = PulseSequence.ramsey(rabi)
    exact = exact_thermal_check(2.0, rc, seq, 220)
    analytic, _, _ = ramsey_population(0.0, rc)
    out.append(_check("thermal_exact_p0", abs(exact.populations.zero - analytic), 1e-6,
                      "exact thermal oracle (nbar = 2) against the analytic fringe"))
    out.append(_check("thermal_return_fidelity", abs(1.0 - exact.motional_fidelity), 1e-7,
                      "final reduced motional state against the initial thermal state"))
    out.append(_check("thermal_purity_preserved",
                      abs(exact.purity_final - exact.purity_initial), 1e-7,
                      "motional purity before vs after a whole-period protocol"))
    mc = monte_carlo_fringe(ThermalSpec(nbar=2.0, n_samples=2000, seed=99), None, rc, seq)
    out.append(_check("thermal_mc_vs_exact", abs(mc.mean - exact.populations.zero), 1e-6,
                      "Monte Carlo ensemble mean against the exact density run"))
    mc_big = monte_carlo_fringe(ThermalSpec(nbar=1000.0, n_samples=10000, seed=7),
                                None, rc_config, PulseSequence.ramsey(rabi))
    out.append(_check("thermal_mc_spread", mc_big.spread, 1e-12,
                      "per-sample P0 spread at nbar = 1000 over 10^4 samples"))
    return out


def _truncation_checks(rabi: float) -> list[CheckResult]:
    worst = 0.0
    for dl in (0.05, 0.0):
        rc = ReducedCouplings.from_dimensionless(l=0.5, dl=dl, d=0.3)
        p0 = {}
        for dim in (128, 192):
            res = ramsey_oracle(coherent_fock(0.4 + 0.3j, dim), rc,
                                PulseSequence.ramsey(rabi), dim)
            p0[dim] = res.populations.zero
        worst = max(worst, abs(p0[128] - p0[192]))
    return [_check("truncation_monotonicity", worst, 1e-9,
                   "oracle P0 change when the truncation grows 128 -> 192")]


def run_suite(document: ConfigDocument | None = None, suite: str = "quick",
              engine_lambda_sign: float = 1.0) -> VerifyReport:
    """Run the verification suite; ``engine_lambda_sign=-1`` is the negative control."""
    if suite not in ("quick", "full"):
        raise ValueError(f"suite must be 'quick' or 'full', got {suite!r}")
    t_start = time.perf_counter()
    if document is None:
        document = ConfigDocument(config=ExperimentConfig())
    config = document.config
    rc = document.reduced()
    full = suite == "full"
    results: list[CheckResult] = []
    results += _constants_checks(config)
    results += _mw_checks(config)
    results += _grid_checks(engine_lambda_sign, full=full)
    results.append(_phase_sign_check(engine_lambda_sign))
    results.append(_return_at_t0_check())
    results += _engine_checks(rc, config)
    results += _contrast_checks(config)
    results += _oracle_protocol_checks(engine_lambda_sign)
    if full:
        results += _random_sequence_checks()
        results += _thermal_checks(rc, config.rabi_Omega)
        results += _truncation_checks(config.rabi_Omega)
    return VerifyReport(suite=suite, results=tuple(results),
                        runtime_s=time.perf_counter() - t_start)
