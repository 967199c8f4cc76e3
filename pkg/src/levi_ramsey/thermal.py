"""Thermal-state immunity of the fringe: Monte Carlo and exact verification.

A thermal motional state is a Gaussian mixture of coherent states
(P function (1/pi nbar) exp(-|beta|^2/nbar)), and since whole-period protocol
results are independent of the coherent label, the fringe survives thermal
motion with zero variance across the mixture.  This module samples the P
function (seeded, reproducible), runs the closed-form engine per sample, and
cross-checks small-nbar cases against the exact density-matrix oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import ReducedCouplings
from .dynamics import DEFAULT_LABEL_MAX, SpinPopulations
from .errors import DomainError
from .fock import FockDensity, fidelity, ramsey_oracle, thermal_fock
from .ramsey import run_sequence
from .sequences import FreeEvolve, PulseSequence


@dataclass(frozen=True)
class ThermalSpec:
    """Thermal ensemble description: occupation, sample count, RNG seed."""

    nbar: float
    n_samples: int = 10000
    seed: int = 2013

    def __post_init__(self):
        if self.nbar < 0:
            raise DomainError("nbar must be >= 0")
        if self.n_samples < 1:
            raise DomainError("n_samples must be >= 1")


def sample_p_function(spec: ThermalSpec) -> np.ndarray:
    """Draw coherent labels from the thermal P function.

    Real and imaginary parts are independent normals of variance nbar/2,
    which reproduces the P-function second moments exactly; nbar = 0 yields
    the zero label for every sample.  Bit-reproducible for a given seed.
    """
    if spec.nbar == 0:
        return np.zeros(spec.n_samples, dtype=complex)
    rng = np.random.default_rng(spec.seed)
    xy = rng.standard_normal((2, spec.n_samples))
    scale = math.sqrt(spec.nbar / 2.0)
    return scale * (xy[0] + 1j * xy[1])


@dataclass(frozen=True)
class MonteCarloResult:
    mean: float                      # ensemble mean of P_0
    spread: float                    # max |P_0(sample) - mean|
    p0_samples: np.ndarray
    betas: np.ndarray
    mean_populations: SpinPopulations
    spec: ThermalSpec


def _with_theta(sequence: PulseSequence, theta: float | None) -> PulseSequence:
    if theta is None:
        return sequence
    steps = tuple(replace(s, theta=theta) if isinstance(s, FreeEvolve) else s
                  for s in sequence.steps)
    return PulseSequence(steps)


def monte_carlo_fringe(spec: ThermalSpec, theta: float | None,
                       couplings: ReducedCouplings, sequence: PulseSequence,
                       allow_partial_periods: bool = False) -> MonteCarloResult:
    """Run the sequence once per sampled label; report mean and max deviation.

    Free segments must be whole trap periods (where the label drops out of
    the result) unless ``allow_partial_periods`` enables diagnostic runs at
    intermediate times.
    """
    if not allow_partial_periods:
        for step in sequence:
            if isinstance(step, FreeEvolve):
                tau = step.tau(couplings.omega_z)
                k = round(tau / (2 * math.pi))
                if abs(tau - 2 * math.pi * k) > 1e-9 * max(1.0, abs(tau)):
                    raise DomainError(
                        "free segments must be whole trap periods; pass "
                        "allow_partial_periods=True for diagnostic runs")
    sequence = _with_theta(sequence, theta)
    betas = sample_p_function(spec)
    label_max = max(DEFAULT_LABEL_MAX, 1.1 * float(np.abs(betas).max()) + 1.0)
    if spec.nbar == 0:
        res = run_sequence(sequence, 0j, couplings, label_max)
        p0 = np.full(spec.n_samples, res.populations.zero)
        return MonteCarloResult(mean=float(res.populations.zero), spread=0.0,
                                p0_samples=p0, betas=betas,
                                mean_populations=res.populations, spec=spec)
    p0 = np.empty(spec.n_samples)
    pops = []
    for i, beta in enumerate(betas):
        res = run_sequence(sequence, complex(beta), couplings, label_max)
        p0[i] = res.populations.zero
        pops.append(res.populations)
    mean = float(p0.mean())
    mean_pops = SpinPopulations(
        float(np.mean([p.plus for p in pops])),
        float(np.mean([p.zero for p in pops])),
        float(np.mean([p.minus for p in pops])))
    return MonteCarloResult(mean=mean, spread=float(np.abs(p0 - mean).max()),
                            p0_samples=p0, betas=betas,
                            mean_populations=mean_pops, spec=spec)


def cat_visibility(nbar: float, t: float, couplings: ReducedCouplings) -> float:
    """Thermal-averaged |+1>/|-1> coherence magnitude at intermediate time t.

    Gaussian P-function average of the branch overlap (including its
    label-dependent phase): exp(-(4 l)^2 |1 - e^{-i w t}|^2 (nbar + 1/2)).
    Reduces to the pure-state overlap visibility at nbar = 0.
    """
    w = 1.0 - complex(math.cos(couplings.omega_z * t), -math.sin(couplings.omega_z * t))
    du = 4.0 * couplings.l
    return math.exp(-du * du * abs(w) ** 2 * (nbar + 0.5))


@dataclass(frozen=True)
class ExactThermalResult:
    populations: SpinPopulations
    motional_fidelity: float    # fidelity of the final reduced motion vs the input
    purity_initial: float
    purity_final: float


def exact_thermal_check(nbar: float, couplings: ReducedCouplings,
                        sequence: PulseSequence, dim: int) -> ExactThermalResult:
    """Exact density-matrix run of the protocol on a thermal state.

    Restricted to small nbar where the truncated basis is trustworthy;
    verifies that a whole-period protocol hands the thermal state back.
    """
    if nbar > 5:
        raise DomainError("exact thermal check is limited to nbar <= 5")
    rho0 = thermal_fock(nbar, dim)
    result = ramsey_oracle(rho0, couplings, sequence, dim)
    reduced = FockDensity(result.motional_reduced)
    return ExactThermalResult(
        populations=result.populations,
        motional_fidelity=fidelity(rho0, reduced),
        purity_initial=rho0.purity(),
        purity_final=reduced.purity(),
    )
