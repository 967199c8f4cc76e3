"""Brute-force truncated-number-basis oracle.

Everything the closed-form engine claims is re-derived here the slow way: the
sector Hamiltonian (dimensionless, hbar = omega_z = 1)

    H_s = d s^2 + n - u(s) (c + c^dag),   u(s) = 2 (s l + dl),

is a real symmetric tridiagonal matrix, diagonalized once per (u, N) and
cached; propagation is the exact exponential through the eigenbasis.  The
scalar d s^2 term commutes with everything and is applied as an exact phase
factor rather than through the eigensolver, so anisotropy cannot perturb
populations even at the last digit.

Full protocol runs live in :func:`ramsey_oracle`, which propagates the
composite spin (x) motion state (pure vectors or density matrices) step by
step and traces out the motion at the end.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .constants import ReducedCouplings
from .dynamics import SpinPopulations, anisotropy_phase
from .errors import DomainError, TruncationError, TruncationWarning
from .sequences import (ECHO_FLIP_MATRIX, EchoFlip, FreeEvolve, Measure,
                        MwPulse, OrientationFlip, PulseSequence)

TAIL_TOL = 1e-12          # tolerated |c_{N-1}|^2 of a constructed state
DENSITY_TAIL_TOL = 1e-10  # tolerated tail weight of a thermal density


def required_dim(beta_max: float) -> int:
    """Truncation heuristic: N >= |beta|^2 + 8 |beta| + 20."""
    b = abs(beta_max)
    return math.ceil(b * b + 8.0 * b + 20.0)


@dataclass
class FockState:
    """Truncated number-basis vector, unit norm."""

    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.ndim != 1:
            raise DomainError("FockState amplitudes must be a 1-d vector")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tail_weight(self) -> float:
        return float(abs(self.amplitudes[-1]) ** 2)

    def mean_n(self) -> float:
        return float(np.arange(self.dim) @ (np.abs(self.amplitudes) ** 2))

    def overlap(self, other: "FockState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def coherent_fock(beta: complex, dim: int, tail_tol: float = TAIL_TOL) -> FockState:
    """Coherent state c_n = e^{-|b|^2/2} b^n / sqrt(n!), by stable recurrence."""
    beta = complex(beta)
    if dim < required_dim(beta):
        raise DomainError(f"dim {dim} below truncation heuristic {required_dim(beta)} "
                          f"for |beta| = {abs(beta):.3g}")
    if abs(beta) ** 2 / 2.0 > 700.0:
        raise DomainError("label too large for a number-basis representation")
    amps = np.empty(dim, dtype=complex)
    amps[0] = math.exp(-abs(beta) ** 2 / 2.0)
    for n in range(1, dim):
        amps[n] = amps[n - 1] * beta / math.sqrt(n)
    tail = float(abs(amps[-1]) ** 2)
    if tail > tail_tol:
        raise TruncationError(f"coherent tail weight {tail:.2e} exceeds {tail_tol:.2e}")
    amps /= np.linalg.norm(amps)
    return FockState(amps)


@dataclass
class FockDensity:
    """Truncated number-basis density matrix: Hermitian, unit trace, PSD."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise DomainError("FockDensity matrix must be square")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def validate(self, herm_tol: float = 1e-12, trace_tol: float = 1e-10,
                 psd_tol: float = 1e-10) -> None:
        dev = float(np.abs(self.matrix - self.matrix.conj().T).max())
        if dev > herm_tol:
            raise DomainError(f"density not Hermitian: deviation {dev:.2e}")
        tr = complex(np.trace(self.matrix))
        if abs(tr - 1.0) > trace_tol:
            raise DomainError(f"density trace {tr:.12g} deviates from 1")
        lo = float(np.linalg.eigvalsh(self.matrix)[0])
        if lo < -psd_tol:
            raise DomainError(f"density not positive semidefinite: min eigenvalue {lo:.2e}")

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def mean_n(self) -> float:
        return float(np.real(np.arange(self.dim) @ np.diag(self.matrix)))


def thermal_fock(nbar: float, dim: int) -> FockDensity:
    """Thermal density, p_n = nbar^n / (1 + nbar)^{n+1}, renormalized on the cut."""
    if nbar < 0:
        raise DomainError("nbar must be >= 0")
    if nbar == 0:
        mat = np.zeros((dim, dim), dtype=complex)
        mat[0, 0] = 1.0
        return FockDensity(mat)
    q = nbar / (1.0 + nbar)
    tail = q ** dim
    if tail > DENSITY_TAIL_TOL:
        raise TruncationError(f"thermal tail weight {tail:.2e} exceeds {DENSITY_TAIL_TOL:.2e} "
                              f"at dim {dim}")
    p = np.exp(np.arange(dim) * math.log(q) - math.log1p(nbar))
    p /= p.sum()
    return FockDensity(np.diag(p.astype(complex)))


def fidelity(rho: FockDensity, sigma: FockDensity) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via eigh."""
    w, v = np.linalg.eigh(rho.matrix)
    w = np.clip(w, 0.0, None)
    sqrt_rho = (v * np.sqrt(w)) @ v.conj().T
    inner = sqrt_rho @ sigma.matrix @ sqrt_rho
    ev = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sqrt(ev).sum() ** 2)


@dataclass(frozen=True)
class SectorHamiltonian:
    """Dimensionless tridiagonal Hamiltonian of one spin sector."""

    s_z: int
    dim: int
    diagonal: np.ndarray      # n + d s^2
    off_diagonal: np.ndarray  # -u(s) sqrt(n+1)

    def matrix(self) -> np.ndarray:
        return (np.diag(self.diagonal)
                + np.diag(self.off_diagonal, 1)
                + np.diag(self.off_diagonal, -1))

    def ground_energy_exact(self, u: float) -> float:
        """Displacement identity: E_0 = d s^2 - u^2 (diagonal already holds d s^2)."""
        return float(self.diagonal[0] - u * u)


def sector_hamiltonian(s_z: int, couplings: ReducedCouplings, dim: int,
                       theta: float | None = None) -> SectorHamiltonian:
    """Build H_s = d s^2 + n - u(s)(c + c^dag) on an N-dimensional cut."""
    u = couplings.u(s_z, theta)
    n = np.arange(dim, dtype=float)
    return SectorHamiltonian(
        s_z=s_z, dim=dim,
        diagonal=n + couplings.d * (s_z * s_z),
        off_diagonal=-u * np.sqrt(n[:-1] + 1.0))


# Eigendecompositions of the u-part (diag n, offdiag -u sqrt(n+1)) keyed by
# (u, N).  Reads vastly outnumber writes; insertion is idempotent, so the
# GIL-atomic dict assignment below is race-free.
_EIG_CACHE: dict[tuple[float, int], tuple[np.ndarray, np.ndarray]] = {}


def _eigensystem(u: float, dim: int) -> tuple[np.ndarray, np.ndarray]:
    key = (float(u), int(dim))
    hit = _EIG_CACHE.get(key)
    if hit is None:
        n = np.arange(dim, dtype=float)
        w, v = eigh_tridiagonal(n, -u * np.sqrt(n[:-1] + 1.0))
        hit = (w, v)
        _EIG_CACHE[key] = hit
    return hit


def displaced_spectrum(u: float, dim: int) -> np.ndarray:
    """Numerical eigenvalues of the u-part; exactly n - u^2 in the full space."""
    return _eigensystem(u, dim)[0]


def _propagator(u: float, tau: float, dim: int) -> np.ndarray:
    """Sector propagator without the d s^2 scalar phase (applied separately)."""
    w, v = _eigensystem(u, dim)
    return (v * np.exp(-1j * w * tau)) @ v.T


def propagate(state: FockState, s_z: int, t: float, couplings: ReducedCouplings,
              *, theta: float | None = None, periods: float | None = None,
              tail_tol: float = 1e-9) -> FockState:
    """Evolve a Fock vector for time t (seconds) in the s_z sector.

    Exact exponential through the cached eigenbasis; warns if the evolved
    state piles weight onto the truncation edge.
    """
    tau = 2.0 * math.pi * periods if periods is not None else couplings.omega_z * t
    u = couplings.u(s_z, theta)
    w, v = _eigensystem(u, state.dim)
    coeffs = v.T @ state.amplitudes
    coeffs *= np.exp(-1j * w * tau)
    out = FockState((v @ coeffs) * anisotropy_phase(couplings.d, s_z, tau))
    if out.tail_weight() > tail_tol:
        warnings.warn(f"evolved tail weight {out.tail_weight():.2e} exceeds {tail_tol:.2e}; "
                      "increase the truncation dimension", TruncationWarning, stacklevel=2)
    return out


@dataclass
class OracleResult:
    """Outcome of a full protocol run in the truncated composite space."""

    populations: SpinPopulations
    motional_reduced: np.ndarray      # N x N density of the motion after the run
    final_pure: np.ndarray | None     # (3, N) amplitudes when the input was pure


def _resolve_theta(step_theta: float | None, couplings: ReducedCouplings,
                   flipped: bool) -> float:
    th = couplings.theta if step_theta is None else step_theta
    return math.pi - th if flipped else th


def ramsey_oracle(initial: FockState | FockDensity, couplings: ReducedCouplings,
                  protocol: PulseSequence, dim: int | None = None) -> OracleResult:
    """Run a protocol on the full spin (x) motion space and trace out motion.

    Pulses act as exact 3x3 unitaries on the spin factor, free segments as
    sector propagators in the number basis, flips as their ideal unitaries.
    """
    if isinstance(initial, FockState):
        n = initial.dim if dim is None else dim
        amps = initial.amplitudes
        if n != initial.dim:
            if n < initial.dim:
                raise DomainError("dim smaller than the initial state")
            amps = np.pad(amps, (0, n - initial.dim))
        psi = np.zeros((3, n), dtype=complex)
        psi[1] = amps  # spin starts in |0>, row order (+1, 0, -1)
        return _run_pure(psi, couplings, protocol)
    if isinstance(initial, FockDensity):
        n = initial.dim if dim is None else dim
        mat = initial.matrix
        if n != initial.dim:
            if n < initial.dim:
                raise DomainError("dim smaller than the initial density")
            mat = np.pad(mat, ((0, n - initial.dim), (0, n - initial.dim)))
        rho = np.zeros((3, n, 3, n), dtype=complex)
        rho[1, :, 1, :] = mat
        return _run_density(rho, couplings, protocol)
    raise DomainError("initial must be a FockState or FockDensity")


def _run_pure(psi: np.ndarray, couplings: ReducedCouplings,
              protocol: PulseSequence) -> OracleResult:
    n = psi.shape[1]
    flipped = False
    for step in protocol:
        if isinstance(step, MwPulse):
            psi = step.unitary() @ psi.reshape(3, n)
        elif isinstance(step, EchoFlip):
            psi = ECHO_FLIP_MATRIX @ psi
        elif isinstance(step, OrientationFlip):
            flipped = not flipped
        elif isinstance(step, FreeEvolve):
            tau = step.tau(couplings.omega_z)
            theta = _resolve_theta(step.theta, couplings, flipped)
            for row, s in enumerate((1, 0, -1)):
                u = couplings.u(s, theta)
                w, v = _eigensystem(u, n)
                coeffs = (v.T @ psi[row]) * np.exp(-1j * w * tau)
                psi[row] = (v @ coeffs) * anisotropy_phase(couplings.d, s, tau)
        elif isinstance(step, Measure):
            pass
    pops = SpinPopulations(*(float(np.vdot(psi[r], psi[r]).real) for r in range(3)))
    reduced = sum(np.outer(psi[r], psi[r].conj()) for r in range(3))
    return OracleResult(populations=pops, motional_reduced=reduced, final_pure=psi)


def _run_density(rho: np.ndarray, couplings: ReducedCouplings,
                 protocol: PulseSequence) -> OracleResult:
    n = rho.shape[1]
    flipped = False
    for step in protocol:
        if isinstance(step, (MwPulse, EchoFlip)):
            u3 = step.unitary() if isinstance(step, MwPulse) else ECHO_FLIP_MATRIX
            rho = np.einsum("ab,bndm,cd->ancm", u3, rho, u3.conj())
        elif isinstance(step, OrientationFlip):
            flipped = not flipped
        elif isinstance(step, FreeEvolve):
            tau = step.tau(couplings.omega_z)
            theta = _resolve_theta(step.theta, couplings, flipped)
            spins = (1, 0, -1)
            props = [_propagator(couplings.u(s, theta), tau, n) for s in spins]
            zs = [anisotropy_phase(couplings.d, s, tau) for s in spins]
            for a in range(3):
                for c in range(3):
                    rho[a, :, c, :] = ((zs[a] * zs[c].conjugate())
                                       * (props[a] @ rho[a, :, c, :] @ props[c].conj().T))
        elif isinstance(step, Measure):
            pass
    pops = SpinPopulations(*(float(np.trace(rho[r, :, r, :]).real) for r in range(3)))
    reduced = rho[0, :, 0, :] + rho[1, :, 1, :] + rho[2, :, 2, :]
    return OracleResult(populations=pops, motional_reduced=reduced, final_pure=None)
