"""Dueling-bandit experiment simulator.

Compares adaptive duel assignment against uniform random assignment on
synthetic and ranker-derived preference matrices, tracking statistical
power over time, false-positive rates under no effect, cumulative strong
regret, and how often the best arm takes part in a duel.
"""

__version__ = "0.1.0"

from .errors import (
    AttemptsExhausted,
    ComplementViolation,
    ConfigMismatch,
    DomainError,
    DuelSimError,
    EmptyInput,
    InvalidWinner,
    ModeMismatch,
    ParseError,
    RangeError,
    ShapeError,
    SizeMismatch,
)
from .preferences import (
    DuelOutcome,
    PreferenceMatrix,
    WinnerAnalysis,
    analyze_winners,
    delta,
    generate_effect_matrix,
    new_preference_matrix,
    sample_duel,
    step_strong_regret,
    zero_effect_matrix,
)
from .policies import (
    ALPHA_EXPLORE,
    ArmPair,
    DtsState,
    dts_bounds,
    dts_select,
    dts_update,
    uniform_select,
)
from .stats import (
    FprSummary,
    PairTestResult,
    PowerSpec,
    PowerSummary,
    aggregate_fpr,
    aggregate_power,
    chi_square_critical,
    chi_square_power,
    chi_square_sf,
    cohens_w_from_delta,
    horizon_for_condition,
    noncentral_chi2_cdf,
    pair_test,
    required_sample_size,
)
from .engine import (
    AggregateReport,
    CheckpointMetrics,
    ExperimentConfig,
    LtrEnvironment,
    SyntheticEnvironment,
    build_condition_grid,
    build_ltr_config,
    default_checkpoints,
    realize_matrix,
    replication_rngs,
    run_condition,
    run_replication,
)
from .ltr import (
    LtrConditionPlan,
    RankerMatrixFile,
    SubmatrixSpec,
    bundled_matrix_path,
    load_matrix,
    ltr_condition,
    sample_submatrix,
)
from .report import (
    generate_report,
    read_condition_csv,
    write_condition_csv,
    write_manifest,
    write_summary_json,
)

__all__ = [
    "__version__",
    "AttemptsExhausted",
    "ComplementViolation",
    "ConfigMismatch",
    "DomainError",
    "DuelSimError",
    "EmptyInput",
    "InvalidWinner",
    "ModeMismatch",
    "ParseError",
    "RangeError",
    "ShapeError",
    "SizeMismatch",
    "DuelOutcome",
    "PreferenceMatrix",
    "WinnerAnalysis",
    "analyze_winners",
    "delta",
    "generate_effect_matrix",
    "new_preference_matrix",
    "sample_duel",
    "step_strong_regret",
    "zero_effect_matrix",
    "ALPHA_EXPLORE",
    "ArmPair",
    "DtsState",
    "dts_bounds",
    "dts_select",
    "dts_update",
    "uniform_select",
    "FprSummary",
    "PairTestResult",
    "PowerSpec",
    "PowerSummary",
    "aggregate_fpr",
    "aggregate_power",
    "chi_square_critical",
    "chi_square_power",
    "chi_square_sf",
    "cohens_w_from_delta",
    "horizon_for_condition",
    "noncentral_chi2_cdf",
    "pair_test",
    "required_sample_size",
    "AggregateReport",
    "CheckpointMetrics",
    "ExperimentConfig",
    "LtrEnvironment",
    "SyntheticEnvironment",
    "build_condition_grid",
    "build_ltr_config",
    "default_checkpoints",
    "realize_matrix",
    "replication_rngs",
    "run_condition",
    "run_replication",
    "LtrConditionPlan",
    "RankerMatrixFile",
    "SubmatrixSpec",
    "bundled_matrix_path",
    "load_matrix",
    "ltr_condition",
    "sample_submatrix",
    "generate_report",
    "read_condition_csv",
    "write_condition_csv",
    "write_manifest",
    "write_summary_json",
]
