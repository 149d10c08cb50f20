"""Hebbian-learned Hopfield memories over graphs of activity time-series."""

__version__ = "0.1.0"

from .community import Partition, community_sizes, louvain, modularity
from .errors import (
    CollmemError,
    EmptyInputError,
    FormatError,
    InsufficientDataError,
    NotFoundError,
    ShapeError,
    UndefinedAccuracyError,
    UndefinedModularityError,
    WindowRangeError,
)
from .graph import TemporalGraph, TimeWindow, neighbors, prune, slice_window
from .hebbian import LearnConfig, learn, similarity, weight_delta
from .hopfield import Pattern, RecallConfig, RecallResult, binarize, mask_pattern, recall, recall_step
from .preprocess import BurstConfig, activity_indicator, burstiness, filter_bursty

__all__ = [
    "BurstConfig",
    "CollmemError",
    "EmptyInputError",
    "FormatError",
    "InsufficientDataError",
    "LearnConfig",
    "NotFoundError",
    "Partition",
    "Pattern",
    "RecallConfig",
    "RecallResult",
    "ShapeError",
    "TemporalGraph",
    "TimeWindow",
    "UndefinedAccuracyError",
    "UndefinedModularityError",
    "WindowRangeError",
    "activity_indicator",
    "binarize",
    "burstiness",
    "community_sizes",
    "filter_bursty",
    "learn",
    "louvain",
    "mask_pattern",
    "modularity",
    "neighbors",
    "prune",
    "recall",
    "recall_step",
    "similarity",
    "slice_window",
    "weight_delta",
]
