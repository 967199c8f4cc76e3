"""Experiment geometry and every coupling constant derived from it.

A levitated dielectric bead with an embedded spin-1 defect sits in a harmonic
optical trap (axial angular frequency ``omega_z``).  A permanently magnetized
sphere on the trap axis produces a field gradient that shifts the trap center
by an amount proportional to the spin projection; tilting the axis by an angle
``theta`` against gravity adds a spin-independent shift.  Everything the rest
of the package needs is condensed here into two records:

* :class:`DerivedCouplings` - the full SI report (masses, couplings in joules,
  figures of merit) produced by :func:`derive_couplings`.
* :class:`ReducedCouplings` - the dimensionless working set ``(l, dl0, d)``
  in units of ``hbar*omega_z``, used by the dynamics, oracle, and protocol
  modules.

Unit conventions, used everywhere in this package:

* all frequencies are angular frequencies in rad/s,
* the zero-point length is ``x_zpf = sqrt(hbar / (2 m omega_z))``,
* phase-space labels are dimensionless; a coherent label ``beta`` has mean
  position ``2 * x_zpf * Re(beta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, asdict

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values, SI units."""

    hbar: float = 1.054571817e-34       # J*s
    mu0: float = 1.25663706212e-6       # T*m/A
    muB: float = 9.2740100783e-24       # J/T
    kB: float = 1.380649e-23            # J/K
    g_freefall: float = 9.80665         # m/s^2

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0.0:
                raise DomainError(f"physical constant {f.name} must be positive")


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class ExperimentConfig:
    """Full physical description of trap, bead, magnet, spin, and environment.

    Field names double as the JSON schema: a config document may contain
    exactly these keys (all optional, defaults below) plus the optional
    ``dimensionless`` and ``sequence`` blocks handled by
    :func:`parse_config_document`.
    """

    bead_radius: float = 100e-9          # m
    density: float = 3000.0              # kg/m^3
    omega_z: float = 1.0e5               # rad/s (axial trap frequency)
    omega_x: float = 1.0e6               # rad/s
    omega_y: float = 1.0e6               # rad/s
    trap_wavelength: float = 1.0e-6      # m
    permittivity: float = 1.5            # dimensionless
    magnet_radius: float = 40e-6         # m
    magnetization: float = 1.5e6         # A/m
    magnet_offset: float = 120e-6        # m, signed position of the magnet on the z axis
    theta: float = math.pi / 2 - math.pi / 20  # rad, tilt of z axis against free fall
    g_NV: float = 2.0                    # Lande factor of the spin
    zero_field_D: float = 2 * math.pi * 2.87e9  # rad/s, S_z^2 anisotropy
    T2: float = 2 * math.pi / 1.0e5      # s, spin dephasing time (defaults to one trap period)
    rabi_Omega: float = 2 * math.pi * 10e6     # rad/s, microwave coupling
    temperature: float = 1e-3            # K

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        checks = [
            ("bead_radius", self.bead_radius > 0, "must be > 0"),
            ("density", self.density > 0, "must be > 0"),
            ("omega_z", self.omega_z > 0, "must be > 0"),
            ("omega_x", self.omega_x >= self.omega_z, "must be >= omega_z"),
            ("omega_y", self.omega_y >= self.omega_z, "must be >= omega_z"),
            ("trap_wavelength", self.trap_wavelength > 0, "must be > 0"),
            ("permittivity", self.permittivity > 1, "must be > 1"),
            ("magnet_radius", self.magnet_radius > 0, "must be > 0"),
            ("magnetization", self.magnetization > 0, "must be > 0"),
            ("magnet_offset", self.magnet_offset != 0, "must be nonzero"),
            ("magnet_offset",
             abs(self.magnet_offset) > self.magnet_radius + self.bead_radius,
             "magnet may not touch the bead: require |magnet_offset| > magnet_radius + bead_radius"),
            ("theta", 0.0 <= self.theta <= math.pi, "must lie in [0, pi]"),
            ("T2", self.T2 > 0, "must be > 0"),
            ("rabi_Omega", self.rabi_Omega > 0, "must be > 0"),
            ("temperature", self.temperature >= 0, "must be >= 0"),
        ]
        for key, ok, why in checks:
            if not ok:
                raise ConfigError(f"config field {key!r} {why} (got {getattr(self, key)!r})", key=key)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown config key: {key!r}", key=key)
        bad = [k for k, v in data.items() if not isinstance(v, (int, float)) or isinstance(v, bool)]
        if bad:
            raise ConfigError(f"config field {bad[0]!r} must be a number", key=bad[0])
        return cls(**{k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DerivedCouplings:
    """Every constant computed from an :class:`ExperimentConfig`.

    ``lambda_`` (serialized as ``"lambda"``) is the spin-gradient coupling in
    joules; ``delta_lambda`` the gravitational one at the working angle
    ``theta``.  ``l`` and ``dl`` are the same in units of ``hbar*omega_z``.
    """

    mass: float                 # kg
    dipole: float               # A*m^2
    x_zpf: float                # m
    lambda_: float              # J
    delta_lambda: float         # J, evaluated at theta
    l: float                    # lambda / (hbar omega_z)
    dl: float                   # delta_lambda / (hbar omega_z)
    u_plus: float               # displaced-center label for s_z = +1
    u_zero: float
    u_minus: float
    t0: float                   # s, one trap period 2*pi/omega_z
    K: float                    # fringe figure of merit, theta-independent
    delta_phi_grav: float       # rad, 2*K*cos(theta)
    gamma_sc: float             # rad/s, photon-scattering decay rate
    gamma_max: float            # rad/s, bound on motional decoherence gamma_sc*(2l)^2
    nbar: float                 # thermal occupation at the config temperature
    well_separation: float      # 4*lambda/(hbar omega_z), dimensionless
    separation_xzpf_m: float    # well separation in meters, x_zpf convention
    separation_2xzpf_m: float   # well separation in meters, 2*x_zpf convention
    theta: float                # rad, the working angle the theta-dependent fields use

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d


@dataclass(frozen=True)
class ReducedCouplings:
    """Dimensionless working couplings in units of ``hbar*omega_z``.

    ``l`` is the spin-gradient coupling, ``dl0`` the gravitational coupling at
    ``cos(theta) = 1`` (the working value scales as ``dl0*cos(theta)``), and
    ``d`` the S_z^2 anisotropy over ``omega_z``.  ``theta`` is the default
    working angle; protocol steps may override it per segment.
    """

    l: float
    dl0: float
    d: float = 0.0
    theta: float = 0.0
    omega_z: float = 1.0e5      # rad/s, needed to convert seconds to phase

    @classmethod
    def from_config(cls, config: ExperimentConfig,
                    constants: PhysicalConstants = CODATA) -> "ReducedCouplings":
        der = derive_couplings(config, constants)
        return cls(l=der.l, dl0=_dl0(config, constants),
                   d=config.zero_field_D / config.omega_z,
                   theta=config.theta, omega_z=config.omega_z)

    @classmethod
    def from_dimensionless(cls, l: float, dl: float, d: float = 0.0,
                           omega_z: float = 1.0e5, theta: float = 0.0) -> "ReducedCouplings":
        """Build directly from dimensionless couplings; ``dl`` is the cos(theta)=1 value."""
        return cls(l=l, dl0=dl, d=d, theta=theta, omega_z=omega_z)

    @property
    def t0(self) -> float:
        return 2 * math.pi / self.omega_z

    def resolve_theta(self, theta: float | None = None, flipped: bool = False) -> float:
        th = self.theta if theta is None else theta
        return math.pi - th if flipped else th

    def dl(self, theta: float | None = None) -> float:
        return self.dl0 * math.cos(self.theta if theta is None else theta)

    def u(self, s_z: int, theta: float | None = None) -> float:
        if s_z not in (-1, 0, 1):
            raise DomainError(f"s_z must be one of -1, 0, +1 (got {s_z!r})")
        return 2.0 * (s_z * self.l + self.dl(theta))

    @property
    def K(self) -> float:
        return 16 * math.pi * self.l * self.dl0

    def grav_phase(self, theta: float | None = None) -> float:
        """Magnitude-signed gravitational phase 2*K*cos(theta) over one period.

        The dynamical relative phase between the s_z = -1 and +1 branches is
        the negative of this value; see :mod:`levi_ramsey.dynamics`.
        """
        return 2.0 * self.K * math.cos(self.theta if theta is None else theta)

    def flipped(self) -> "ReducedCouplings":
        """Orientation reversal theta -> pi - theta (gravity coupling sign flip)."""
        return ReducedCouplings(l=self.l, dl0=self.dl0, d=self.d,
                                theta=math.pi - self.theta, omega_z=self.omega_z)


def derive_mass(bead_radius: float, density: float) -> float:
    """Mass of a homogeneous sphere, (4/3) pi R^3 rho."""
    if bead_radius <= 0 or density <= 0:
        raise DomainError("bead_radius and density must be positive")
    return (4.0 / 3.0) * math.pi * bead_radius ** 3 * density


def derive_dipole(magnetization: float, magnet_radius: float) -> float:
    """Dipole moment of a uniformly magnetized sphere, M * (4 pi / 3) r0^3."""
    if magnetization <= 0 or magnet_radius <= 0:
        raise DomainError("magnetization and magnet_radius must be positive")
    return magnetization * (4.0 * math.pi / 3.0) * magnet_radius ** 3


def field_gradient(dipole: float, magnet_offset: float,
                   constants: PhysicalConstants = CODATA) -> float:
    """Gradient scale B0 = 3 mu0 m_z z0 / (4 pi |z0|^5) in T/m (signed with z0)."""
    if magnet_offset == 0:
        raise DomainError("magnet_offset must be nonzero")
    return (3.0 * constants.mu0 * dipole * magnet_offset
            / (4.0 * math.pi * abs(magnet_offset) ** 5))


def field_expansion(dipole: float, magnet_offset: float,
                    displacement: tuple[float, float, float],
                    constants: PhysicalConstants = CODATA) -> tuple[float, float, float]:
    """First-order expansion of the dipole field about the trap center.

    Returns (B_x, B_y, B_z) at the given displacement; divergence- and
    curl-free by construction:

        B_x = -B0 x,  B_y = -B0 y,  B_z = mu0 m_z / (2 pi |z0|^3) + 2 B0 z.
    """
    x, y, z = displacement
    b0 = field_gradient(dipole, magnet_offset, constants)
    bz0 = constants.mu0 * dipole / (2.0 * math.pi * abs(magnet_offset) ** 3)
    return (-b0 * x, -b0 * y, bz0 + 2.0 * b0 * z)


def scattering_rate(config: ExperimentConfig) -> float:
    """Photon-scattering decay rate of the trapped bead in rad/s.

    gamma_sc = omega_z * (16 pi^3 / 15) * ((eps - 1)/(eps + 2)) * (R/lambda0)^3.
    """
    eps, lam0 = config.permittivity, config.trap_wavelength
    if eps <= -2 or lam0 <= 0:
        raise DomainError("need permittivity > -2 and trap_wavelength > 0")
    return (config.omega_z * (16.0 * math.pi ** 3 / 15.0)
            * ((eps - 1.0) / (eps + 2.0))
            * (config.bead_radius / lam0) ** 3)


def thermal_occupation(temperature: float, omega_z: float,
                       constants: PhysicalConstants = CODATA) -> float:
    """Bose-Einstein occupation 1/(exp(hbar omega_z / kB T) - 1); 0 at T = 0."""
    if temperature < 0:
        raise DomainError("temperature must be >= 0")
    if omega_z <= 0:
        raise DomainError("omega_z must be > 0")
    if temperature == 0:
        return 0.0
    x = constants.hbar * omega_z / (constants.kB * temperature)
    if x > 700.0:  # exp would overflow; occupation is indistinguishable from 0
        return 0.0
    return 1.0 / math.expm1(x)


def _x_zpf(mass: float, omega_z: float, constants: PhysicalConstants) -> float:
    return math.sqrt(constants.hbar / (2.0 * mass * omega_z))


def _dl0(config: ExperimentConfig, constants: PhysicalConstants) -> float:
    """Gravitational coupling at cos(theta) = 1 in units of hbar*omega_z."""
    m = derive_mass(config.bead_radius, config.density)
    xz = _x_zpf(m, config.omega_z, constants)
    return (0.5 * m * constants.g_freefall * xz) / (constants.hbar * config.omega_z)


def derive_couplings(config: ExperimentConfig,
                     constants: PhysicalConstants = CODATA) -> DerivedCouplings:
    """Derive every coupling constant and figure of merit from the geometry.

    The gravitational coupling is evaluated at the config's working angle;
    ``K`` uses its cos(theta)=1 value and is therefore theta-independent, with
    ``delta_phi_grav = 2 K cos(theta)`` holding identically.
    """
    config.validate()
    hbar, wz = constants.hbar, config.omega_z
    mass = derive_mass(config.bead_radius, config.density)
    dipole = derive_dipole(config.magnetization, config.magnet_radius)
    x_zpf = _x_zpf(mass, wz, constants)
    b0 = field_gradient(dipole, config.magnet_offset, constants)
    lam = b0 * config.g_NV * constants.muB * x_zpf
    dlam0 = 0.5 * mass * constants.g_freefall * x_zpf  # cos(theta) = 1 value
    cos_th = math.cos(config.theta)
    dlam = dlam0 * cos_th
    t0 = 2 * math.pi / wz
    l = lam / (hbar * wz)
    dl = dlam / (hbar * wz)
    K = 8.0 * lam * dlam0 * t0 / (hbar ** 2 * wz)
    gamma_sc = scattering_rate(config)
    sep = 4.0 * l
    return DerivedCouplings(
        mass=mass,
        dipole=dipole,
        x_zpf=x_zpf,
        lambda_=lam,
        delta_lambda=dlam,
        l=l,
        dl=dl,
        u_plus=2.0 * (l + dl),
        u_zero=2.0 * dl,
        u_minus=2.0 * (-l + dl),
        t0=t0,
        K=K,
        delta_phi_grav=2.0 * K * cos_th,
        gamma_sc=gamma_sc,
        gamma_max=gamma_sc * (2.0 * l) ** 2,
        nbar=thermal_occupation(config.temperature, wz, constants),
        well_separation=sep,
        separation_xzpf_m=sep * x_zpf,
        separation_2xzpf_m=sep * 2.0 * x_zpf,
        theta=config.theta,
    )


@dataclass(frozen=True)
class ConfigDocument:
    """A parsed config JSON: the physical config plus the optional blocks.

    ``dimensionless``, when present, carries ``{l, dl, d}`` (``dl`` is the
    cos(theta)=1 value; the working angle defaults to 0 so the given value is
    used as-is).  ``sequence`` is kept raw for the protocol layer to parse.
    """

    config: ExperimentConfig
    dimensionless: dict | None = None
    sequence: list | None = None

    def reduced(self, constants: PhysicalConstants = CODATA) -> ReducedCouplings:
        if self.dimensionless is not None:
            dd = self.dimensionless
            return ReducedCouplings.from_dimensionless(
                l=float(dd["l"]), dl=float(dd["dl"]), d=float(dd.get("d", 0.0)),
                omega_z=self.config.omega_z, theta=0.0)
        return ReducedCouplings.from_config(self.config, constants)


def parse_config_document(data: dict) -> ConfigDocument:
    """Parse a config JSON document, rejecting unknown keys by name."""
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    data = dict(data)
    dimless = data.pop("dimensionless", None)
    sequence = data.pop("sequence", None)
    if dimless is not None:
        if not isinstance(dimless, dict):
            raise ConfigError("'dimensionless' must be an object", key="dimensionless")
        for k in dimless:
            if k not in ("l", "dl", "d"):
                raise ConfigError(f"unknown dimensionless key: {k!r}", key=k)
        for k in ("l", "dl"):
            if k not in dimless:
                raise ConfigError(f"dimensionless block requires {k!r}", key=k)
    if sequence is not None and not isinstance(sequence, list):
        raise ConfigError("'sequence' must be an array of step objects", key="sequence")
    return ConfigDocument(config=ExperimentConfig.from_dict(data),
                          dimensionless=dimless, sequence=sequence)
