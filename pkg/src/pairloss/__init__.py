"""Pairwise-error ranking loss with analytic gradients and verification oracles."""

from .distance import (
    ce_distance,
    ce_distance_grad_wrt_u,
    distance_value,
    sigmoid_distance,
    sigmoid_distance_grad_wrt_u,
    step_distance,
)
from .loss import (
    LossResult,
    evaluate_loss,
    evaluate_with_gradient,
    gradient_autodiff_ce,
    gradient_error_driven,
)
from .oracle import (
    BruteForceResult,
    GradCheckReport,
    brute_force_loss,
    finite_difference_gradient,
    gradient_check,
)
from .ranking import (
    RankStats,
    balance_constant,
    compute_ranks,
    select_top_q_negatives,
    valid_negative_count,
    valid_pair_indicator,
)
from .scorefile import ScoreFileError, read_score_file, write_score_file
from .sim import (
    GeneratorSpec,
    Trajectory,
    TrajectoryRecord,
    descend_scores,
    generate_scores,
    ranking_ap,
    simulate_training,
)
from .types import (
    DistanceKind,
    DistanceSpec,
    DivergenceError,
    FilterMode,
    FilterSpec,
    GradientForm,
    Label,
    LossConfig,
    PairBudget,
    Reduction,
    ScoreSet,
    UndefinedMetricError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "BruteForceResult",
    "DistanceKind",
    "DistanceSpec",
    "DivergenceError",
    "FilterMode",
    "FilterSpec",
    "GeneratorSpec",
    "GradCheckReport",
    "GradientForm",
    "Label",
    "LossConfig",
    "LossResult",
    "PairBudget",
    "RankStats",
    "Reduction",
    "ScoreFileError",
    "ScoreSet",
    "Trajectory",
    "TrajectoryRecord",
    "UndefinedMetricError",
    "ValidationError",
    "balance_constant",
    "brute_force_loss",
    "ce_distance",
    "ce_distance_grad_wrt_u",
    "compute_ranks",
    "descend_scores",
    "distance_value",
    "evaluate_loss",
    "evaluate_with_gradient",
    "finite_difference_gradient",
    "generate_scores",
    "gradient_autodiff_ce",
    "gradient_check",
    "gradient_error_driven",
    "ranking_ap",
    "read_score_file",
    "select_top_q_negatives",
    "sigmoid_distance",
    "sigmoid_distance_grad_wrt_u",
    "simulate_training",
    "step_distance",
    "valid_negative_count",
    "valid_pair_indicator",
    "write_score_file",
]
