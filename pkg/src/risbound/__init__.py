"""Channel-gain bounds and optimizers for 1-bit programmable scattering surfaces.

A multiport network model of a SISO link through ``n_s`` two-state
programmable scatterers, four nested upper bounds on the achievable channel
power gain (norm inequality, its gauge-optimized refinement, a
lossless-network bound, and a semidefinite relaxation), the exact
reparametrizations that leave every bound invariant, and discrete optimizers
(exhaustive, coordinate descent, genetic, relaxation rounding) with an
incremental-update enumeration kernel.
"""

from ._es import backend_name, gain_table
from .bounds import (
    BoundReport,
    IbdIntermediates,
    NioOptions,
    ibd_achiever,
    ibd_bound,
    ni_bound,
    nio_bound,
)
from .errors import (
    DegenerateAchieverWarning,
    DegenerateDenominatorWarning,
    ForbiddenPole,
    GaugeError,
    IllConditionedMobius,
    InvalidNoise,
    NonContractiveM,
    NotContractive,
    NotUnitModulusLoads,
    NumericalFailure,
    ParseError,
    RisboundError,
    SingularResolvent,
    SingularUpdate,
    SolverNotConverged,
    TooLarge,
    ZeroGaugeEntry,
    ZeroMatrix,
)
from .gauges import (
    GaugeParameters,
    apply_complex_scaling,
    apply_diagonal_similarity,
    apply_gauge,
    apply_mobius,
    gauge_admissible,
    random_admissible_gauge,
)
from .model import (
    ModelParameters,
    capacity_from_gain,
    channel_gain,
    channel_gain_batch,
    channel_gain_full,
    encode_loads,
    prepare_baseline,
    reduce_model,
    shannon_capacity,
    woodbury_channel,
)
from .optimize import (
    GaParams,
    OptimizerResult,
    coordinate_descent,
    exhaustive_search,
    genetic_algorithm,
    project_sdr,
)
from .reports import ResultRow, write_csv, write_json
from .scenarios import (
    LOAD_SETS,
    LoadSet,
    ScenarioSpec,
    generate_scenario,
    load_model,
    load_set,
    save_model,
    with_loads,
)
from .sdp import ConicProgram, ConicSolution, SolverOptions, solve_sdp
from .sdr import (
    QcqpData,
    SdrSolution,
    auxiliary_vector,
    build_qcqp,
    build_sdp,
    constraint_residuals,
    effective_rank,
    gauge_identity_check,
    sdr_bound,
)
from .verify import VerificationOutcome, run_verification

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "ModelParameters",
    "encode_loads",
    "channel_gain",
    "channel_gain_full",
    "channel_gain_batch",
    "prepare_baseline",
    "woodbury_channel",
    "reduce_model",
    "shannon_capacity",
    "capacity_from_gain",
    # gauges
    "GaugeParameters",
    "apply_diagonal_similarity",
    "apply_complex_scaling",
    "apply_mobius",
    "apply_gauge",
    "gauge_admissible",
    "random_admissible_gauge",
    # bounds
    "BoundReport",
    "NioOptions",
    "IbdIntermediates",
    "ni_bound",
    "nio_bound",
    "ibd_bound",
    "ibd_achiever",
    # relaxation
    "QcqpData",
    "SdrSolution",
    "build_qcqp",
    "auxiliary_vector",
    "constraint_residuals",
    "build_sdp",
    "sdr_bound",
    "effective_rank",
    "gauge_identity_check",
    # conic solver
    "SolverOptions",
    "ConicProgram",
    "ConicSolution",
    "solve_sdp",
    # optimizers
    "OptimizerResult",
    "GaParams",
    "exhaustive_search",
    "coordinate_descent",
    "genetic_algorithm",
    "project_sdr",
    "backend_name",
    "gain_table",
    # scenarios & io
    "ScenarioSpec",
    "LoadSet",
    "LOAD_SETS",
    "load_set",
    "generate_scenario",
    "with_loads",
    "save_model",
    "load_model",
    "ResultRow",
    "write_csv",
    "write_json",
    # verification
    "VerificationOutcome",
    "run_verification",
    # errors
    "RisboundError",
    "SingularResolvent",
    "SingularUpdate",
    "InvalidNoise",
    "TooLarge",
    "GaugeError",
    "ZeroGaugeEntry",
    "NonContractiveM",
    "ForbiddenPole",
    "IllConditionedMobius",
    "NotUnitModulusLoads",
    "NotContractive",
    "ZeroMatrix",
    "SolverNotConverged",
    "NumericalFailure",
    "ParseError",
    "DegenerateAchieverWarning",
    "DegenerateDenominatorWarning",
]
