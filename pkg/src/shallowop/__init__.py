"""Shallow vector-valued networks for operators on discretized inputs.

Approximates maps F from compact families of functions, sequences, or
matrices into seminormed targets by s -> sum_j eta(l_j(s) - theta_j) v_j,
built in two stages: an epsilon-net with a hat partition of unity, then
seeded random-feature ridge fits of the partition coefficients.
"""

from .construct import (
    AssemblyReport,
    EpsilonNet,
    ErrorBudget,
    FitConfig,
    PartitionOfUnity,
    ScalarRidgeNet,
    assemble_vector_network,
    build_epsilon_net,
    build_partition,
    draw_features,
    dual_uniform_error,
    finite_rank_apply,
    fit_ridge_features,
    fit_scalar_ridge,
    least_squares_solve,
    uniform_error,
)
from .errors import ConfigError, CoverageError, DocumentError, ShapeError
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    RunResult,
    emit_report,
    read_report_csv,
    run_experiment,
)
from .inputs import (
    CompactEnsemble,
    EnsembleSpec,
    FunctionSample,
    FunctionalSpec,
    LinearFunctional,
    MatrixPoint,
    MatrixTrace,
    QuadraturePairing,
    SequenceDot,
    SequencePoint,
    ZeroFunctional,
    random_functional,
    sample_ensemble,
)
from .network import (
    Gaussian,
    Neuron,
    Polynomial,
    Relu,
    ShallowVectorNetwork,
    Sigmoid,
    Tanh,
    deserialize_network,
    make_activation,
    network_sum,
    serialize_network,
)
from .operators import (
    Kernel,
    Operator,
    integral_operator,
    make_kernel,
    matrix_map_operator,
    poisson_operator,
    poisson_solve_1d,
    superposition_operator,
    zero_operator,
)
from .presets import get_preset, preset_description, preset_dict, preset_names
from .seeding import derive_seed
from .targets import (
    DualPairing,
    GridMeta,
    LqNorm,
    SchwartzWeighted,
    SeminormFamily,
    SupDerivative,
    TargetElement,
    family_sup_error,
)

__version__ = "0.1.0"
