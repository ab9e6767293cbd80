"""Online quantum state tomography with the matrix-exponentiated gradient."""
__version__ = "0.1.0"

from .exceptions import (
    EnsembleError,
    EstimatorStepError,
    InvalidInputError,
    InvalidParameterError,
    UnsupportedDimensionError,
)
from .linalg import eig_hermitian, exp_hermitian, fidelity, log_psd, purity
from .measurements import (
    MeasurementBasis,
    MeasurementFamily,
    eigenbasis_of,
    generalized_pauli_operators,
    is_informationally_complete,
    mub_family,
    pauli_family,
)
from .meg import (
    EstimatorState,
    MegConfig,
    TrackTrace,
    gradient,
    initial_state,
    loss,
    meg_step,
    pure_projection,
    track,
)
from .photons import CountRecord, NoiseConfig, expected_counts, measure_iteration, sample_counts
from .states import (
    EvolutionSpec,
    density_of,
    evolve,
    haar_random_pure,
    make_rng,
    pauli_z_general,
    random_hermitian,
)
from .bench import (
    AggregateStats,
    ScenarioConfig,
    aggregate,
    iterations_to_threshold,
    mean_infidelity,
    noise_sweep,
    run_ensemble,
)
