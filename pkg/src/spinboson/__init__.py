"""Exact pure-dephasing dynamics of N qubits coupled to a Gaussian boson bath."""

from .bosons import BosonMixture, boson_state, mixture_moments
from .channel import (apply_map, check_density_matrix, coherence_sectors, evolve, purity,
                      sector_damping_profile, sector_magnitudes)
from .errors import (CapacityError, IntegrationError, InvalidStateError, SpinBosonError,
                     UnsupportedVariantError, ValidationError)
from .exponents import (EvolutionExponent, characteristic_kernel, damping,
                        damping_from_characteristic, damping_squeezed_thermal,
                        damping_thermal, evolution_exponent, exponent_matrix, lamb_phase,
                        lamb_shift_W, lamb_shift_W_tilde)
from .linear import (classify_topology, contract_flips, contract_spins, dephasing_matrix,
                     fully_connected_coupling, ising_lamb_matrix, sectorized_coupling,
                     uniform_damping_scalar, uniform_lamb_scalar)
from .model import (BathSpec, LinearCoupling, PolynomialCoupling, SystemSpec, enumerate_basis,
                    magnetization)
from .oracle import FockTruncation, compare, evolve_exact, thermal_cutoff, trace_distance
from .spectral import (Ohmic, Tabulated, convergence_study, cross_spectral, damping_integral,
                       discretize, lamb_integral, ramp_coefficient)

__version__ = "0.1.0"
