"""Swarm-based optimization toolkit with a kernel SVM tuned by it."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DataError,
    ParseError,
    SwarmSvmError,
)
from .report import RunReport, format_float, format_record, format_vector
from .svm import (
    Dataset,
    KernelSpec,
    KktReport,
    SvmModel,
    brute_force_dual,
    decision_value,
    decision_values,
    dual_objective,
    dump_model,
    kernel_eval,
    kernel_matrix,
    load_model,
    parse_model,
    predict,
    predict_batch,
    save_model,
    train,
    verify_kkt,
)
from .tuning import TunedModel, TunerConfig, cv_error, stratified_fold_ids, tune, write_trace
from .adult import (
    AdultRecord,
    EncodedDataset,
    EncodingStats,
    IngestResult,
    encode,
    ingest,
    stratified_sample,
)
from .cobb_douglas import (
    ProductionProblem,
    analytic_solution,
    solve_numerically,
    utility,
)
from .rcpsp import (
    FeasibilityReport,
    ProjectInstance,
    Schedule,
    check_feasible,
    decode_priorities,
    parse_psplib,
    read_best_known,
)
from .swarm import (
    ObjectiveSpec,
    SwarmConfig,
    SwarmState,
    alpha_at,
    geometric_gamma,
    init_swarm,
    optimize,
    step,
    swarm_config_from_mapping,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DataError",
    "ParseError",
    "SwarmSvmError",
    "RunReport",
    "format_float",
    "format_record",
    "format_vector",
    "Dataset",
    "KernelSpec",
    "KktReport",
    "SvmModel",
    "brute_force_dual",
    "decision_value",
    "decision_values",
    "dual_objective",
    "dump_model",
    "kernel_eval",
    "kernel_matrix",
    "load_model",
    "parse_model",
    "predict",
    "predict_batch",
    "save_model",
    "train",
    "verify_kkt",
    "TunedModel",
    "TunerConfig",
    "cv_error",
    "stratified_fold_ids",
    "tune",
    "write_trace",
    "AdultRecord",
    "EncodedDataset",
    "EncodingStats",
    "IngestResult",
    "encode",
    "ingest",
    "stratified_sample",
    "ProductionProblem",
    "analytic_solution",
    "solve_numerically",
    "utility",
    "FeasibilityReport",
    "ProjectInstance",
    "Schedule",
    "check_feasible",
    "decode_priorities",
    "parse_psplib",
    "read_best_known",
    "ObjectiveSpec",
    "SwarmConfig",
    "SwarmState",
    "alpha_at",
    "geometric_gamma",
    "init_swarm",
    "optimize",
    "step",
    "swarm_config_from_mapping",
    "__version__",
]
