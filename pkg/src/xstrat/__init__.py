"""Stratified train/test partitioning for extreme multi-label datasets.

The sampler repeatedly swaps the worst-balanced points between the two
partitions until per-label test proportions approach the target, which
keeps rare labels represented on heavily tailed label distributions.
Random and iterative baselines plus divergence metrics round things out.
"""

from .baselines import SplitTimeout, iterative_split, random_split
from .data import (
    Dataset,
    LabelCounts,
    Partition,
    SplitAssignment,
    actual_test_proportions,
    count_labels,
)
from .metrics import (
    DatasetStats,
    HistogramReport,
    SplitReport,
    UndefinedMetricError,
    dataset_stats,
    evaluate_split,
    kl_divergence,
    kl_divergence_smoothed,
    missing_label_fraction,
    proportion_histogram,
)
from .repo_io import (
    ParseError,
    concatenate_provided_split,
    format_assignment_index,
    parse_assignment_index,
    parse_repo_format,
    read_dataset,
    write_repo_format,
    write_split,
)
from .stratified import (
    EpochTrace,
    SamplerConfig,
    ScoreState,
    decay_schedule,
    initialize_split,
    label_scores,
    point_scores,
    score_state,
    stratified_split,
    swap_pass,
    swap_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetStats",
    "EpochTrace",
    "HistogramReport",
    "LabelCounts",
    "ParseError",
    "Partition",
    "SamplerConfig",
    "ScoreState",
    "SplitAssignment",
    "SplitReport",
    "SplitTimeout",
    "UndefinedMetricError",
    "actual_test_proportions",
    "concatenate_provided_split",
    "count_labels",
    "dataset_stats",
    "decay_schedule",
    "evaluate_split",
    "format_assignment_index",
    "initialize_split",
    "iterative_split",
    "kl_divergence",
    "kl_divergence_smoothed",
    "label_scores",
    "missing_label_fraction",
    "parse_assignment_index",
    "parse_repo_format",
    "point_scores",
    "proportion_histogram",
    "random_split",
    "read_dataset",
    "score_state",
    "stratified_split",
    "swap_pass",
    "swap_threshold",
    "write_repo_format",
    "write_split",
]
