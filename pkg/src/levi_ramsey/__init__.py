"""Spin-probed matter-wave interferometry of a levitated thermal nano-oscillator.

The package derives every coupling constant from experimental geometry,
propagates spin-conditioned coherent states in closed form, cross-checks the
closed form against a truncated number-basis oracle, runs interferometric
pulse protocols (including spin echo with orientation reversal), and verifies
that the fringe survives thermal motional states.
"""

from .constants import (CODATA, ConfigDocument, DerivedCouplings,
                        ExperimentConfig, PhysicalConstants, ReducedCouplings,
                        derive_couplings, derive_dipole, derive_mass,
                        field_expansion, field_gradient, parse_config_document,
                        scattering_rate, thermal_occupation)
from .dynamics import (ConditionalBranch, HybridPureState, SpinPopulations,
                       branch_separation, coherent_overlap, evolve_coherent,
                       overlap_visibility, trajectory, u_of)
from .errors import (ConfigError, DomainError, LeviRamseyError, SequenceError,
                     TruncationError, TruncationWarning)
from .fock import (FockDensity, FockState, OracleResult, SectorHamiltonian,
                   coherent_fock, fidelity, propagate, ramsey_oracle,
                   required_dim, sector_hamiltonian, thermal_fock)
from .ramsey import (FringeRow, FringeScan, SequenceResult, contrast_model,
                     free_evolve, fringe_scan, ramsey_population, run_sequence)
from .sequences import (EchoFlip, FreeEvolve, Measure, MwPulse,
                        OrientationFlip, PulseSequence, SpinVector,
                        half_pi_duration, mw_unitary)
from .thermal import (ExactThermalResult, MonteCarloResult, ThermalSpec,
                      cat_visibility, exact_thermal_check, monte_carlo_fringe,
                      sample_p_function)
from .verify import CheckResult, VerifyReport, run_suite

__version__ = "0.1.0"
