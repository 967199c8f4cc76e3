"""Closed-form spin-conditioned coherent-state dynamics.

Each spin sector ``s_z`` sees a harmonic well whose center is displaced to the
dimensionless label ``u(s_z) = 2 (s_z l + dl)``, so a coherent state ``beta``
orbits on the circle of center ``u`` and radius ``|beta - u|``:

    beta(t) = (beta - u) e^{-i w t} + u,

and accumulates the phase (dimensionless angle ``tau = omega_z t``, anisotropy
``d = D/omega_z``)

    phi(tau) = (u^2 - d s_z^2) tau + u Im(beta) - u Im[(beta - u) e^{-i tau}],

the exact result of transforming to the displaced frame, evolving freely, and
transforming back (verified against the truncated-number-basis propagator in
:mod:`levi_ramsey.fock`).  At whole periods the label returns to ``beta``
exactly and the phase collapses to ``(u^2 - d s_z^2) tau``, independent of
``beta`` - the property all protocol-level results rely on.

Phases are always folded into complex branch amplitudes; labels stay pure
circle geometry.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .constants import ReducedCouplings
from .errors import DomainError

DEFAULT_LABEL_MAX = 50.0     # guards downstream number-basis truncation
MERGE_TOL = 1e-12            # labels closer than this are the same branch
_SPIN_VALUES = (1, 0, -1)    # basis order used for amplitude triples


def check_label(beta: complex, label_max: float = DEFAULT_LABEL_MAX) -> complex:
    """Validate a coherent-state label: finite and within the configured bound."""
    beta = complex(beta)
    if not (math.isfinite(beta.real) and math.isfinite(beta.imag)):
        raise DomainError("coherent label must be finite")
    if abs(beta) > label_max:
        raise DomainError(f"|beta| = {abs(beta):.3g} exceeds the label bound {label_max:.3g}")
    return beta


def coherent_overlap(a: complex, b: complex) -> complex:
    """Exact overlap <a|b> = exp(-(|a|^2 + |b|^2)/2 + conj(a) b).

    Equal labels short-circuit to exactly 1, so merged branches and repeated
    thermal samples see no rounding noise.
    """
    if a == b:
        return 1.0 + 0.0j
    return cmath.exp(-0.5 * (a.real * a.real + a.imag * a.imag)
                     - 0.5 * (b.real * b.real + b.imag * b.imag)
                     + a.conjugate() * b)


def u_of(s_z: int, couplings: ReducedCouplings, theta: float | None = None) -> float:
    """Displaced well center u(s_z) = 2 (s_z l + dl(theta))."""
    return couplings.u(s_z, theta)


def _evolve_geo(beta: complex, u: float, tau: float) -> tuple[float, complex]:
    """Geometric part of the map: (phase without the anisotropy term, label).

    Angles within a few ulp of a whole number of periods snap to the exact
    periodic point, so states prepared with t = k*t0 come back bit-identical.
    """
    k = round(tau / (2.0 * math.pi))
    # 64 ulp absorbs the rounding of omega_z * (k * 2 pi / omega_z) at any k
    if abs(tau - 2.0 * math.pi * k) <= 64.0 * 2.220446049250313e-16 * max(2.0 * math.pi, abs(tau)):
        return (u * u * tau, beta)
    rot = cmath.exp(-1j * tau)
    moving = (beta - u) * rot
    phase = u * u * tau + u * beta.imag - u * moving.imag
    return (phase, moving + u)


def anisotropy_phase(d: float, s_z: int, tau: float) -> complex:
    """exp(-i d s_z^2 tau); one shared expression so the +1 and -1 sectors
    carry the bit-identical factor and it cancels exactly from any fringe."""
    angle = d * (s_z * s_z) * tau
    return complex(math.cos(angle), -math.sin(angle))


def evolve_coherent(beta: complex, s_z: int, t: float, couplings: ReducedCouplings,
                    *, theta: float | None = None,
                    periods: float | None = None) -> tuple[float, complex]:
    """Evolve a coherent label for time ``t`` (seconds) in the ``s_z`` sector.

    Returns ``(phase, label)``.  Pass ``periods`` instead of ``t`` to specify
    the duration as a multiple of the trap period (exact at integers).
    """
    if periods is not None:
        if periods < 0:
            raise DomainError("periods must be >= 0")
        tau = 2.0 * math.pi * periods
    else:
        if t < 0:
            raise DomainError("t must be >= 0")
        tau = couplings.omega_z * t
    u = couplings.u(s_z, theta)
    geo, label = _evolve_geo(complex(beta), u, tau)
    return (geo - couplings.d * (s_z * s_z) * tau, label)


class TrajectoryPoint(NamedTuple):
    t: float
    label: complex
    phase: float


def trajectory(beta: complex, s_z: int, times: Iterable[float],
               couplings: ReducedCouplings,
               theta: float | None = None) -> list[TrajectoryPoint]:
    """Pointwise closed-form evolution over a sorted, nonnegative time grid."""
    times = list(times)
    if any(t < 0 for t in times):
        raise DomainError("times must be nonnegative")
    if any(t2 < t1 for t1, t2 in zip(times, times[1:])):
        raise DomainError("times must be sorted ascending")
    out = []
    for t in times:
        phase, label = evolve_coherent(beta, s_z, t, couplings, theta=theta)
        out.append(TrajectoryPoint(t, label, phase))
    return out


@dataclass(frozen=True)
class SeparationInfo:
    """Separation of the two outer spin branches in phase space (and meters)."""

    separation: float            # |beta(t,+1) - beta(t,-1)|, beta-independent
    well_separation: float       # 4 l, distance of the two well centers
    trajectory_max: float        # 8 l, attained at half a period
    meters_xzpf: float | None    # well separation via x_zpf (None without geometry)
    meters_2xzpf: float | None   # well separation via 2 x_zpf


def branch_separation(t: float, couplings: ReducedCouplings,
                      x_zpf: float | None = None) -> SeparationInfo:
    """Distance between the s_z = +1 and -1 branch labels at time t."""
    if t < 0:
        raise DomainError("t must be >= 0")
    tau = couplings.omega_z * t
    four_l = 4.0 * couplings.l
    sep = four_l * abs(1.0 - cmath.exp(-1j * tau))
    return SeparationInfo(
        separation=sep,
        well_separation=four_l,
        trajectory_max=2.0 * four_l,
        meters_xzpf=None if x_zpf is None else four_l * x_zpf,
        meters_2xzpf=None if x_zpf is None else four_l * 2.0 * x_zpf,
    )


def overlap_visibility(t: float, couplings: ReducedCouplings) -> float:
    """|<beta(t,-1)|beta(t,+1)>| = exp(-separation(t)^2 / 2); beta-independent."""
    sep = branch_separation(t, couplings).separation
    return math.exp(-0.5 * sep * sep)


class SpinPopulations(NamedTuple):
    """Populations in the (+1, 0, -1) order."""

    plus: float
    zero: float
    minus: float


@dataclass(frozen=True)
class ConditionalBranch:
    """One term of a hybrid superposition: spin eigenvalue, amplitude, label."""

    s_z: int
    amplitude: complex
    label: complex

    def __post_init__(self):
        if self.s_z not in (-1, 0, 1):
            raise DomainError(f"s_z must be one of -1, 0, +1 (got {self.s_z!r})")
        for name, z in (("amplitude", complex(self.amplitude)),
                        ("label", complex(self.label))):
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise DomainError(f"branch {name} must be finite")


class HybridPureState:
    """Superposition of (spin eigenvalue, amplitude, coherent label) branches.

    Spin unitaries fan each branch out over the three spin values and merge
    branches whose labels coincide within :data:`MERGE_TOL`; free evolution
    acts branchwise through :func:`evolve_coherent`.  The norm uses exact
    coherent-state overlaps, so it stays 1 to machine precision under every
    unitary operation.

    The label bound is enforced where states enter the system (initial
    labels, sampled thermal labels); closed-form evolution itself is exact at
    any amplitude and its outputs are not clamped.
    """

    def __init__(self, branches: Iterable[ConditionalBranch]):
        self.branches: tuple[ConditionalBranch, ...] = tuple(branches)

    @classmethod
    def spin_zero(cls, beta: complex,
                  label_max: float = DEFAULT_LABEL_MAX) -> "HybridPureState":
        """Product state |beta> (x) |s_z = 0>."""
        beta = check_label(beta, label_max)
        return cls([ConditionalBranch(0, 1.0 + 0.0j, beta)])

    def sector(self, s_z: int) -> list[ConditionalBranch]:
        return [br for br in self.branches if br.s_z == s_z]

    def single_branch(self, s_z: int) -> ConditionalBranch:
        sec = self.sector(s_z)
        if len(sec) != 1:
            raise DomainError(f"sector {s_z:+d} holds {len(sec)} branches, expected exactly 1")
        return sec[0]

    def norm(self) -> float:
        return math.sqrt(max(0.0, sum(self.populations())))

    def populations(self) -> SpinPopulations:
        """Spin populations from exact pairwise coherent overlaps."""
        pops = {}
        for s in _SPIN_VALUES:
            sec = self.sector(s)
            p = 0.0
            for i, bi in enumerate(sec):
                p += abs(bi.amplitude) ** 2
                for bj in sec[i + 1:]:
                    p += 2.0 * (bi.amplitude.conjugate() * bj.amplitude
                                * coherent_overlap(bi.label, bj.label)).real
            pops[s] = p
        return SpinPopulations(pops[1], pops[0], pops[-1])

    def spin_density(self):
        """3x3 reduced spin density matrix (motion traced out), (+1,0,-1) order."""
        rho = [[0.0 + 0.0j] * 3 for _ in range(3)]
        for a, sa in enumerate(_SPIN_VALUES):
            for b, sb in enumerate(_SPIN_VALUES):
                acc = 0.0 + 0.0j
                for bi in self.sector(sa):
                    for bj in self.sector(sb):
                        acc += (bi.amplitude * bj.amplitude.conjugate()
                                * coherent_overlap(bj.label, bi.label))
                rho[a][b] = acc
        return rho

    def apply_spin_matrix(self, matrix) -> "HybridPureState":
        """Apply a 3x3 unitary on the spin factor (identity on motion)."""
        merged: list[ConditionalBranch] = []
        for br in self.branches:
            col = _SPIN_VALUES.index(br.s_z)
            for row, s_new in enumerate(_SPIN_VALUES):
                amp = complex(matrix[row][col]) * br.amplitude
                if amp == 0:
                    continue
                _merge_into(merged, s_new, amp, br.label)
        return HybridPureState(merged)

    def echo_flip(self) -> "HybridPureState":
        """Instantaneous ideal swap |+1> <-> |-1>."""
        return HybridPureState(
            [ConditionalBranch(-br.s_z, br.amplitude, br.label) for br in self.branches])

    def relative_phase(self, s_a: int = -1, s_b: int = 1) -> float:
        """Phase of sector ``s_a``'s amplitude relative to sector ``s_b``'s.

        Requires both sectors to hold a single branch; wrapped to (-pi, pi].
        """
        a = self.single_branch(s_a).amplitude
        b = self.single_branch(s_b).amplitude
        return cmath.phase(a / b)


def _merge_into(branches: list[ConditionalBranch], s_z: int,
                amplitude: complex, label: complex) -> None:
    for i, br in enumerate(branches):
        if br.s_z == s_z and abs(br.label - label) <= MERGE_TOL:
            branches[i] = ConditionalBranch(s_z, br.amplitude + amplitude, br.label)
            return
    branches.append(ConditionalBranch(s_z, amplitude, label))
