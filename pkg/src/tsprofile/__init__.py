"""Exact, anytime, parallel matrix profile computation for time series.

The matrix profile of a series holds, for every length-m window, the
z-normalized Euclidean distance to its most similar non-overlapping window
and that neighbor's position — low values mark motifs, high values mark
discords.  This package computes it exactly with an incremental diagonal
kernel, balanced static scheduling over private per-worker profiles, and
optional anytime budgets that leave a valid partial result.
"""

from .core import (
    EPS_SCALE,
    NO_NEIGHBOR,
    ORDERINGS,
    PRECISIONS,
    Profile,
    RunConfig,
    WindowStats,
    distance,
    dot_product,
    precompute_stats,
    update_dot,
    validate_series,
)
from .engine import (
    RunResult,
    compute_diagonal,
    matrix_profile,
    reduce_profiles,
    run,
)
from .estimator import MatrixProfileTransformer
from .oracle import brute_force_profile, pair_distance
from .planner import PlanReport, arithmetic_intensity, balanced_workers
from .scheduler import DiagonalSchedule, schedule_diagonals

__version__ = "0.1.0"

__all__ = [
    "EPS_SCALE",
    "NO_NEIGHBOR",
    "ORDERINGS",
    "PRECISIONS",
    "DiagonalSchedule",
    "MatrixProfileTransformer",
    "PlanReport",
    "Profile",
    "RunConfig",
    "RunResult",
    "WindowStats",
    "arithmetic_intensity",
    "balanced_workers",
    "brute_force_profile",
    "compute_diagonal",
    "distance",
    "dot_product",
    "matrix_profile",
    "pair_distance",
    "precompute_stats",
    "reduce_profiles",
    "run",
    "schedule_diagonals",
    "update_dot",
    "validate_series",
    "__version__",
]
