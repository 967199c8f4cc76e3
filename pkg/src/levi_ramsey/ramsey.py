"""Protocol execution on the closed-form representation, and fringe formulas.

A full interferometric run is: equal-superposition pulse, one trap period of
free evolution, closing pulse, spin measurement.  Over a whole period the
motion refactorizes, the surviving |+1> / |-1> relative phase is set by the
gravitational potential difference of the two displaced wells, and the
central-state population reads it out:

    P_0 = cos^2(dphi / 2),    dphi = 2 K cos(theta).

A mid-protocol population swap of |+1> and |-1> cancels the accumulated phase
(and with it slow dephasing); reversing the tilt direction for the second
period (theta -> pi - theta) makes the gravitational phase add instead,
doubling it.  Dephasing and photon scattering enter as multiplicative
contrast factors on the fringe, never as open-system dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import ReducedCouplings
from .dynamics import (DEFAULT_LABEL_MAX, ConditionalBranch, HybridPureState,
                       SpinPopulations, _evolve_geo, anisotropy_phase)
from .errors import DomainError, SequenceError
from .sequences import (ECHO_FLIP_MATRIX, EchoFlip, FreeEvolve, Measure,
                        MwPulse, OrientationFlip, PulseSequence)


def free_evolve(state: HybridPureState, couplings: ReducedCouplings,
                duration: float | None = None, *, periods: float | None = None,
                theta: float | None = None) -> HybridPureState:
    """Evolve every branch in its own spin sector; phases go to the amplitudes.

    The anisotropy phase is multiplied in as a separate factor (bit-identical
    for s_z = +1 and -1) so fringes are exactly independent of it.
    """
    if periods is not None:
        tau = 2.0 * math.pi * periods
    else:
        tau = couplings.omega_z * duration
    branches = []
    for br in state.branches:
        geo, label = _evolve_geo(br.label, couplings.u(br.s_z, theta), tau)
        amp = (br.amplitude * complex(math.cos(geo), math.sin(geo))
               * anisotropy_phase(couplings.d, br.s_z, tau))
        branches.append(ConditionalBranch(br.s_z, amp, label))
    return HybridPureState(branches)


@dataclass(frozen=True)
class SequenceResult:
    populations: SpinPopulations
    final_state: HybridPureState | None
    norm: float


def run_sequence(sequence: PulseSequence, initial, couplings: ReducedCouplings,
                 label_max: float = DEFAULT_LABEL_MAX) -> SequenceResult:
    """Execute a pulse sequence on the closed-form representation.

    ``initial`` is a coherent label (complex), a prepared
    :class:`HybridPureState`, or a :class:`~levi_ramsey.thermal.ThermalSpec`
    (which delegates to the Monte-Carlo ensemble and returns mean populations
    with no single final state).
    """
    if hasattr(initial, "nbar") and hasattr(initial, "n_samples"):
        from .thermal import monte_carlo_fringe  # local import avoids a cycle
        mc = monte_carlo_fringe(initial, None, couplings, sequence)
        return SequenceResult(populations=mc.mean_populations, final_state=None,
                              norm=1.0)
    if isinstance(initial, HybridPureState):
        state = initial
    else:
        state = HybridPureState.spin_zero(complex(initial), label_max)
    flipped = False
    for step in sequence:
        if isinstance(step, MwPulse):
            state = state.apply_spin_matrix(step.unitary())
        elif isinstance(step, EchoFlip):
            state = state.apply_spin_matrix(ECHO_FLIP_MATRIX)
        elif isinstance(step, OrientationFlip):
            flipped = not flipped
        elif isinstance(step, FreeEvolve):
            theta = couplings.resolve_theta(step.theta, flipped)
            state = free_evolve(state, couplings, step.duration,
                                periods=step.periods, theta=theta)
        elif isinstance(step, Measure):
            pass
        else:
            raise SequenceError(f"unknown step {step!r}")
    return SequenceResult(populations=state.populations(), final_state=state,
                          norm=state.norm())


def contrast_model(t_free: float, *, T2: float | None = None,
                   gamma_max: float | None = None) -> float:
    """Fringe contrast C = exp(-t_free/T2) * exp(-gamma_max t_free).

    Either factor is disabled by passing None.  ``gamma_max`` is the bounded
    motional decoherence rate gamma_sc * (2 lambda / hbar omega_z)^2.
    """
    if t_free < 0:
        raise DomainError("t_free must be >= 0")
    c = 1.0
    if T2 is not None:
        if T2 <= 0:
            raise DomainError("T2 must be > 0")
        c *= math.exp(-t_free / T2)
    if gamma_max is not None:
        if gamma_max < 0:
            raise DomainError("gamma_max must be >= 0")
        c *= math.exp(-gamma_max * t_free)
    return c


def ramsey_population(theta: float, couplings: ReducedCouplings,
                      contrast: float = 1.0,
                      echo: bool = False) -> tuple[float, float, float]:
    """Analytic fringe row: returns (P_0, dphi, C).

    P_0 = (1 + C cos(dphi)) / 2 with dphi = 2 K cos(theta), doubled under the
    echo-with-orientation-flip protocol; equals cos^2(dphi/2) at C = 1.
    """
    dphi = couplings.grav_phase(theta)
    if echo:
        dphi = 2.0 * dphi
    return (0.5 * (1.0 + contrast * math.cos(dphi)), dphi, contrast)


@dataclass(frozen=True)
class FringeRow:
    theta: float
    delta_phi: float
    contrast: float
    p0: float
    pplus: float
    pminus: float


@dataclass(frozen=True)
class FringeScan:
    rows: tuple[FringeRow, ...]


def fringe_scan(thetas, couplings: ReducedCouplings, *,
                echo: bool = False, T2: float | None = None,
                gamma_max: float | None = None) -> FringeScan:
    """Tabulate the analytic fringe over a theta grid.

    The free time entering the contrast model is one trap period, or two for
    the echo protocol.  Rows satisfy P_0 + P_+ + P_- = 1 exactly.
    """
    thetas = list(thetas)
    if not thetas:
        raise DomainError("theta grid must be nonempty")
    t_free = couplings.t0 * (2.0 if echo else 1.0)
    c = contrast_model(t_free, T2=T2, gamma_max=gamma_max)
    rows = []
    for th in thetas:
        p0, dphi, _ = ramsey_population(th, couplings, contrast=c, echo=echo)
        side = 0.5 * (1.0 - p0)
        rows.append(FringeRow(theta=th, delta_phi=dphi, contrast=c,
                              p0=p0, pplus=side, pminus=side))
    return FringeScan(tuple(rows))
