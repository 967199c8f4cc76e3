"""Pulse-sequence protocol types and the exact microwave spin unitary.

The microwave drive couples |0> symmetrically to |+1> and |-1>:

    H_mw / hbar = Omega (|+1><0| + |-1><0| + h.c.),

so the bright state (|+1>+|-1>)/sqrt(2) and |0> form a two-level block with
effective coupling sqrt(2) Omega while the dark state (|+1>-|-1>)/sqrt(2)
stays untouched.  A pulse of duration t_p = pi / (2 sqrt(2) Omega) turns |0>
into the equal superposition of |+1> and |-1>.  Pulses are idealized: the
drive dominates every other coupling, so nothing else evolves during one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SequenceError


def half_pi_duration(rabi: float) -> float:
    """Duration t_p = pi / (2 sqrt(2) Omega) of the equal-superposition pulse."""
    if rabi <= 0:
        raise DomainError("rabi must be > 0")
    return math.pi / (2.0 * math.sqrt(2.0) * rabi)


def mw_unitary(duration: float, rabi: float) -> np.ndarray:
    """Exact 3x3 unitary exp(-i H_mw t / hbar) in the (+1, 0, -1) basis."""
    if duration < 0:
        raise DomainError("duration must be >= 0")
    angle = math.sqrt(2.0) * rabi * duration
    c, s = math.cos(angle), math.sin(angle)
    return np.array([
        [(1.0 + c) / 2.0, -1j * s / math.sqrt(2.0), (c - 1.0) / 2.0],
        [-1j * s / math.sqrt(2.0), c, -1j * s / math.sqrt(2.0)],
        [(c - 1.0) / 2.0, -1j * s / math.sqrt(2.0), (1.0 + c) / 2.0],
    ])


ECHO_FLIP_MATRIX = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)


@dataclass(frozen=True)
class SpinVector:
    """Bare spin state (a_plus, a_zero, a_minus) with unit norm."""

    amplitudes: tuple[complex, complex, complex]

    def __post_init__(self):
        n = math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes))
        if abs(n - 1.0) > 1e-12:
            raise DomainError(f"spin vector norm deviates from 1 by {abs(n - 1):.2e}")

    def apply(self, matrix: np.ndarray) -> "SpinVector":
        v = matrix @ np.asarray(self.amplitudes, dtype=complex)
        return SpinVector(tuple(v))

    def populations(self) -> tuple[float, float, float]:
        return tuple(abs(a) ** 2 for a in self.amplitudes)


@dataclass(frozen=True)
class MwPulse:
    """Microwave pulse; duration defaults to the equal-superposition t_p."""

    duration: float
    rabi: float

    def __post_init__(self):
        if self.duration < 0:
            raise SequenceError("pulse duration must be >= 0")
        if self.rabi <= 0:
            raise SequenceError("pulse rabi must be > 0")

    @classmethod
    def half_pi(cls, rabi: float) -> "MwPulse":
        return cls(half_pi_duration(rabi), rabi)

    def unitary(self) -> np.ndarray:
        return mw_unitary(self.duration, self.rabi)


@dataclass(frozen=True)
class FreeEvolve:
    """Free evolution segment; specify seconds or trap periods, not both.

    ``theta`` overrides the working angle for this segment (before any
    pending orientation flip); None uses the couplings' default.
    """

    duration: float | None = None
    periods: float | None = None
    theta: float | None = None

    def __post_init__(self):
        if (self.duration is None) == (self.periods is None):
            raise SequenceError("free segment needs exactly one of duration or periods")
        span = self.duration if self.duration is not None else self.periods
        if span < 0:
            raise SequenceError("free segment length must be >= 0")

    def tau(self, omega_z: float) -> float:
        """Dimensionless phase angle of this segment."""
        if self.periods is not None:
            return 2.0 * math.pi * self.periods
        return omega_z * self.duration

    def seconds(self, omega_z: float) -> float:
        if self.duration is not None:
            return self.duration
        return self.periods * 2.0 * math.pi / omega_z


@dataclass(frozen=True)
class EchoFlip:
    """Ideal instantaneous swap of the |+1> and |-1> amplitudes."""


@dataclass(frozen=True)
class OrientationFlip:
    """Reverses the tilt, theta -> pi - theta, for all subsequent segments."""


@dataclass(frozen=True)
class Measure:
    """Terminal spin population measurement."""


Step = MwPulse | FreeEvolve | EchoFlip | OrientationFlip | Measure


@dataclass(frozen=True)
class PulseSequence:
    """Ordered protocol steps; at most one Measure, and only as the last step."""

    steps: tuple[Step, ...]

    def __post_init__(self):
        for i, step in enumerate(self.steps):
            if isinstance(step, Measure) and i != len(self.steps) - 1:
                raise SequenceError("Measure must be the last step")

    def __iter__(self):
        return iter(self.steps)

    def free_seconds(self, omega_z: float) -> float:
        """Total free-evolution time, the argument of the contrast model."""
        return sum(s.seconds(omega_z) for s in self.steps if isinstance(s, FreeEvolve))

    @classmethod
    def ramsey(cls, rabi: float, periods: float = 1.0,
               theta: float | None = None) -> "PulseSequence":
        """pulse - free - pulse - measure."""
        return cls((MwPulse.half_pi(rabi), FreeEvolve(periods=periods, theta=theta),
                    MwPulse.half_pi(rabi), Measure()))

    @classmethod
    def spin_echo(cls, rabi: float, orientation_flip: bool = True,
                  periods_each: float = 1.0,
                  theta: float | None = None) -> "PulseSequence":
        """pulse - free - echo [- orientation flip] - free - pulse - measure."""
        mid: tuple[Step, ...] = (EchoFlip(),)
        if orientation_flip:
            mid += (OrientationFlip(),)
        return cls((MwPulse.half_pi(rabi), FreeEvolve(periods=periods_each, theta=theta))
                   + mid
                   + (FreeEvolve(periods=periods_each, theta=theta),
                      MwPulse.half_pi(rabi), Measure()))

    @classmethod
    def from_json(cls, steps: list, default_rabi: float) -> "PulseSequence":
        """Parse the JSON step-object list of a config document."""
        parsed: list[Step] = []
        for i, raw in enumerate(steps):
            if not isinstance(raw, dict) or "type" not in raw:
                raise SequenceError(f"step {i} must be an object with a 'type' field")
            kind = raw["type"]
            extra = set(raw) - {"type", "duration", "rabi", "periods", "theta"}
            if extra:
                raise SequenceError(f"step {i} has unknown key {sorted(extra)[0]!r}")
            if kind == "mw_pulse":
                rabi = float(raw.get("rabi", default_rabi))
                duration = raw.get("duration")
                parsed.append(MwPulse.half_pi(rabi) if duration is None
                              else MwPulse(float(duration), rabi))
            elif kind == "free":
                theta = raw.get("theta")
                parsed.append(FreeEvolve(
                    duration=None if "duration" not in raw else float(raw["duration"]),
                    periods=None if "periods" not in raw else float(raw["periods"]),
                    theta=None if theta is None else float(theta)))
            elif kind == "echo_flip":
                parsed.append(EchoFlip())
            elif kind == "orientation_flip":
                parsed.append(OrientationFlip())
            elif kind == "measure":
                parsed.append(Measure())
            else:
                raise SequenceError(f"step {i} has unknown type {kind!r}")
        return cls(tuple(parsed))

    def to_json(self) -> list:
        out = []
        for step in self.steps:
            if isinstance(step, MwPulse):
                out.append({"type": "mw_pulse", "duration": step.duration, "rabi": step.rabi})
            elif isinstance(step, FreeEvolve):
                entry: dict = {"type": "free"}
                if step.duration is not None:
                    entry["duration"] = step.duration
                if step.periods is not None:
                    entry["periods"] = step.periods
                if step.theta is not None:
                    entry["theta"] = step.theta
                out.append(entry)
            elif isinstance(step, EchoFlip):
                out.append({"type": "echo_flip"})
            elif isinstance(step, OrientationFlip):
                out.append({"type": "orientation_flip"})
            elif isinstance(step, Measure):
                out.append({"type": "measure"})
        return out
