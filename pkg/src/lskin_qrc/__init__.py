"""Open bosonic networks with input-encoded asymmetric hopping as quantum reservoirs."""

from .dynamics import (DensityMatrix, DegenerateSteadyStateError, Propagator, PropagatorCache,
                       StateValidationError, esp_check, expm, population_profile,
                       separability_check, spectrum, steady_state, trace_distance)
from .estimator import LinearReadout, QuantumReservoir, ShotNoise
from .features import from_features, to_features
from .fock import FockBasis, SectorOperator, enumerate_sector, hop_operator, number_operator
from .liouvillian import (DissipatorSpec, Liouvillian, build_liouvillian, interpolated_dissipator,
                          jump_set, liouvillian_for)
from .network import NetworkSpec, build_hamiltonian, sample_network
from .reservoir import (ReservoirConfig, RunResult, add_shot_noise, capacity, evolve_sequence,
                        initial_state, memory_profile, run_experiment, sweep_noise, train_readout)
from .tasks import TaskSpec, generate_inputs, target_series

__version__ = "0.1.0"
