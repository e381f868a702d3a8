"""Joint beam scheduling and power allocation for mixed near/far-field
wireless power and information transfer with an extremely large array."""

from ._kernels import BACKEND as kernel_backend
from .config import ConfigError, ExperimentConfig, dbm_to_watts, load_config, watts_to_dbm
from .correlation import (
    DegenerateCurvature,
    build_correlation_matrix,
    correlation_approx,
    correlation_exact,
    correlation_params,
    dirichlet_correlation,
)
from .geometry import (
    ArrayGeometry,
    Placement,
    array_gain,
    channel_gain,
    far_steering,
    near_steering,
    spatial_angle_from_aod,
)
from .model import (
    CompactProblem,
    EnergyReceiver,
    InfoReceiver,
    RestrictedProblem,
    Scenario,
    Schedule,
    build_compact,
    eliminate_binaries,
    harvested_sum_power,
    recover_schedule,
    sinr_id,
    sum_rate,
)
from .sca import SCAConfig, ScheduleInfeasible, SolveResult, r_low, sca_solve
from .schemes import (
    SCHEME_NAMES,
    CapExceeded,
    SchemeResult,
    all_sched_epa,
    exhaustive_search,
    greedy_opa,
    optimal_sched_epa,
    proposed,
    run_scheme,
)
from .subproblem import (
    InfeasibleSubproblem,
    NumericalFailure,
    SolverOptions,
    SolverReport,
    eliminate_slacks_check,
    solve_subproblem,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "CapExceeded",
    "CompactProblem",
    "ConfigError",
    "DegenerateCurvature",
    "EnergyReceiver",
    "ExperimentConfig",
    "InfeasibleSubproblem",
    "InfoReceiver",
    "NumericalFailure",
    "Placement",
    "RestrictedProblem",
    "SCAConfig",
    "SCHEME_NAMES",
    "Scenario",
    "Schedule",
    "ScheduleInfeasible",
    "SchemeResult",
    "SolveResult",
    "SolverOptions",
    "SolverReport",
    "all_sched_epa",
    "array_gain",
    "build_compact",
    "build_correlation_matrix",
    "channel_gain",
    "correlation_approx",
    "correlation_exact",
    "correlation_params",
    "dbm_to_watts",
    "dirichlet_correlation",
    "eliminate_binaries",
    "eliminate_slacks_check",
    "exhaustive_search",
    "far_steering",
    "greedy_opa",
    "harvested_sum_power",
    "kernel_backend",
    "load_config",
    "near_steering",
    "optimal_sched_epa",
    "proposed",
    "r_low",
    "recover_schedule",
    "run_scheme",
    "sca_solve",
    "sinr_id",
    "solve_subproblem",
    "spatial_angle_from_aod",
    "sum_rate",
    "watts_to_dbm",
]
