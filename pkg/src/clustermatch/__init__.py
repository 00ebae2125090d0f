"""Joint matching of several feature sets by constrained clustering."""

from .assignment import brute_force_lap, pad_to_square, solve_lap
from .consistency import (
    MatchConfiguration,
    StarConfiguration,
    expand_star,
    pairwise_consistency,
    unary_consistency,
)
from .costmodel import CostParams, build_cost
from .data import Dataset, FeatureMatrix
from .matchers import (
    MatchOptions,
    hung_lin,
    hung_pair,
    match_cluster,
    match_cluster_fast,
    star_to_config,
)
from .metrics import accuracy, clustering_error, summarize
from .synthgen import SyntheticSpec, generate

__all__ = [
    "CostParams",
    "Dataset",
    "FeatureMatrix",
    "MatchConfiguration",
    "MatchOptions",
    "StarConfiguration",
    "SyntheticSpec",
    "accuracy",
    "brute_force_lap",
    "build_cost",
    "clustering_error",
    "expand_star",
    "generate",
    "hung_lin",
    "hung_pair",
    "match_cluster",
    "match_cluster_fast",
    "pad_to_square",
    "pairwise_consistency",
    "solve_lap",
    "star_to_config",
    "summarize",
    "unary_consistency",
]
