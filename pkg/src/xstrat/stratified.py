"""Swap-based stratified sampling for extreme multi-label data.

Starting from a uniform random split at the target test size, each epoch
scores every label by how far its test share sits from the target, scores
every point by how much its own partition over-holds its labels, and
flips a decaying fraction of the highest-scored points to the other
partition.  The test size is free to drift: trading extra test points for
fewer missing labels is the intended equilibrium, not an error.

Every epoch is a deterministic function of (dataset, config): per-point
swap randomness comes from a stream keyed on (seed, epoch) and drawn as a
full vector in point order, so thread count and evaluation order cannot
change the outcome.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import (
    _PARALLEL_MIN_POINTS,
    _shard_bounds,
    Dataset,
    LabelCounts,
    SplitAssignment,
    TEST,
    actual_test_proportions,
    count_labels,
)


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs for the swap sampler.

    ``threshold_proportion`` and ``swap_probability`` are starting values;
    both shrink by a factor of ``decay`` every epoch after the first.
    """

    target_test_size: float
    epochs: int = 50
    threshold_proportion: float = 0.1
    swap_probability: float = 0.1
    decay: float = 1.1
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.target_test_size < 1.0:
            raise ValueError(f"target_test_size must be in (0,1), got {self.target_test_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not 0.0 < self.threshold_proportion <= 1.0:
            raise ValueError(
                f"threshold_proportion must be in (0,1], got {self.threshold_proportion}")
        if not 0.0 <= self.swap_probability <= 1.0:
            raise ValueError(
                f"swap_probability must be in [0,1], got {self.swap_probability}")
        if self.decay < 1.0:
            raise ValueError(f"decay must be >= 1, got {self.decay}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class ScoreState:
    """One epoch's scores: per label, per point, and the swap cutoff."""

    label_score: np.ndarray
    point_score: np.ndarray
    threshold_score: float


@dataclass(frozen=True)
class EpochTrace:
    """Diagnostics per epoch: scores are measured before the swap pass,
    test size and swap count after it."""

    epoch: int
    mean_abs_label_score: float
    achieved_test_size: float
    num_swapped: int


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def initialize_split(num_points: int, target_test_size: float,
                     rng: np.random.Generator) -> SplitAssignment:
    """Uniform random split with exactly round(n * target) test points.

    Implemented as a seeded shuffle of the point indices, taking the
    first round(n * target) as test.
    """
    if num_points < 1:
        raise ValueError("need at least one point to split")
    num_test = _round_half_up(num_points * target_test_size)
    if num_test <= 0 or num_test >= num_points:
        raise ValueError(
            f"target_test_size={target_test_size} leaves an empty partition "
            f"for {num_points} points"
        )
    flags = np.zeros(num_points, dtype=np.uint8)
    flags[rng.permutation(num_points)[:num_test]] = 1
    return SplitAssignment(partition_of=flags, seed=None)


def label_scores(counts: LabelCounts, target_test_size: float) -> np.ndarray:
    """Signed, normalized deviation of each label's test share from target.

    Positive means over-represented in test (+1 = all instances in test),
    negative under-represented (-1 = none), 0 exactly on target.
    """
    t = target_test_size
    atp = actual_test_proportions(counts)
    return np.where(atp >= t, (atp - t) / (1.0 - t), (atp - t) / t)


def _point_sums_range(dataset: Dataset, per_label: np.ndarray,
                      lo: int, hi: int) -> np.ndarray:
    i0, i1 = dataset.label_indptr[lo], dataset.label_indptr[hi]
    widths = np.diff(dataset.label_indptr[lo:hi + 1])
    local = np.repeat(np.arange(hi - lo), widths)
    return np.bincount(local, weights=per_label[dataset.label_ids[i0:i1]],
                       minlength=hi - lo)


def point_scores(dataset: Dataset, assignment: SplitAssignment,
                 label_score: np.ndarray, threads: int = 1) -> np.ndarray:
    """Per-point swap pressure from its labels' scores.

    A label over-held in the point's own partition always pushes the
    score up: test points add each label's score, train points subtract
    it.  Points with no labels score 0.
    """
    if assignment.num_points != dataset.num_points:
        raise ValueError("assignment does not match dataset")
    n = dataset.num_points
    if threads <= 1 or n < _PARALLEL_MIN_POINTS:
        sums = _point_sums_range(dataset, label_score, 0, n)
    else:
        bounds = _shard_bounds(n, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            shards = list(pool.map(
                lambda lh: _point_sums_range(dataset, label_score, lh[0], lh[1]),
                zip(bounds[:-1], bounds[1:]),
            ))
        sums = np.concatenate(shards) if shards else np.zeros(0)
    signs = np.where(assignment.partition_of == TEST, 1.0, -1.0)
    return signs * sums


def swap_threshold(scores: np.ndarray, threshold_proportion: float) -> float:
    """Upper empirical quantile used as the swap cutoff.

    Starts from the ascending-rank ceil((1 - threshold_proportion) * n)
    order statistic, which leaves a threshold_proportion-sized fraction
    strictly above when scores are distinct.  Runs of equal scores need
    care: if the run straddling the rank reaches the maximum, nothing
    would sit strictly above, so the cutoff steps down to the next
    distinct value to keep the swap stage live (unless all scores are
    equal, the converged state, which swaps nothing).  Otherwise the
    step down happens only when it brings the strictly-above fraction
    closer to threshold_proportion.
    """
    n = len(scores)
    if n == 0:
        raise ValueError("no scores")
    if not 0.0 < threshold_proportion <= 1.0:
        raise ValueError(
            f"threshold_proportion must be in (0,1], got {threshold_proportion}")
    rank = max(int(math.ceil((1.0 - threshold_proportion) * n)), 1)
    ordered = np.sort(scores)
    at_rank = ordered[rank - 1]
    lower = ordered[:rank - 1]
    lower = lower[lower < at_rank]
    if len(lower) == 0:
        return float(at_rank)
    next_below = lower[-1]
    above_at = n - int(np.searchsorted(ordered, at_rank, side="right"))
    if above_at == 0:
        return float(next_below)
    above_next = n - int(np.searchsorted(ordered, next_below, side="right"))
    err_at = abs(above_at / n - threshold_proportion)
    err_next = abs(above_next / n - threshold_proportion)
    return float(next_below) if err_next < err_at else float(at_rank)


def swap_pass(
    point_score: np.ndarray,
    threshold_proportion: float,
    swap_probability: float,
    rng: np.random.Generator,
    assignment: SplitAssignment,
    eligible: np.ndarray | None = None,
) -> tuple[SplitAssignment, int]:
    """Flip high-scored points to the alternate partition.

    Points scoring strictly above the threshold flip independently with
    probability ``swap_probability``.  One uniform draw is consumed per
    point, in index order, whether or not the point is over threshold.
    ``eligible`` masks points that may never flip (used to pin points
    with no labels to their initial partition; the threshold itself is
    still computed over all scores).
    """
    if not 0.0 < threshold_proportion <= 1.0:
        raise ValueError(f"threshold_proportion must be in (0,1], got {threshold_proportion}")
    if not 0.0 <= swap_probability <= 1.0:
        raise ValueError(f"swap_probability must be in [0,1], got {swap_probability}")
    if len(point_score) != assignment.num_points:
        raise ValueError("scores do not match assignment")
    threshold = swap_threshold(point_score, threshold_proportion)
    draws = rng.random(len(point_score))
    flips = (point_score > threshold) & (draws < swap_probability)
    if eligible is not None:
        flips &= eligible
    new_flags = assignment.partition_of.copy()
    new_flags[flips] ^= 1
    return SplitAssignment(partition_of=new_flags, seed=assignment.seed), int(flips.sum())


def decay_schedule(initial_value: float, decay: float, epoch: int) -> float:
    """Epoch 1 uses the configured initial value; each later epoch
    divides by ``decay`` once more."""
    if epoch < 1:
        raise ValueError(f"epoch counts from 1, got {epoch}")
    return initial_value / decay ** (epoch - 1)


def score_state(dataset: Dataset, assignment: SplitAssignment,
                target_test_size: float, threshold_proportion: float,
                threads: int = 1) -> ScoreState:
    """Compute one epoch's full scoring state (diagnostic entry point)."""
    counts = count_labels(dataset, assignment, threads=threads)
    per_label = label_scores(counts, target_test_size)
    per_point = point_scores(dataset, assignment, per_label, threads=threads)
    return ScoreState(
        label_score=per_label,
        point_score=per_point,
        threshold_score=swap_threshold(per_point, threshold_proportion),
    )


def stratified_split(dataset: Dataset, config: SamplerConfig,
                     threads: int = 1) -> tuple[SplitAssignment, list[EpochTrace]]:
    """Run the full swap sampler and return the final split plus a trace.

    Fully deterministic in (dataset, config): the initializer draws from
    a stream keyed on (seed, 0) and epoch ``e`` from (seed, e).
    """
    if dataset.num_points < 2:
        raise ValueError("need at least two points to stratify")
    assignment = initialize_split(
        dataset.num_points, config.target_test_size,
        np.random.default_rng([config.seed, 0]),
    ).with_seed(config.seed)
    swappable = dataset.labels_per_point > 0
    eligible = None if swappable.all() else swappable

    trace: list[EpochTrace] = []
    for epoch in range(1, config.epochs + 1):
        counts = count_labels(dataset, assignment, threads=threads)
        per_label = label_scores(counts, config.target_test_size)
        per_point = point_scores(dataset, assignment, per_label, threads=threads)
        tp = decay_schedule(config.threshold_proportion, config.decay, epoch)
        sp = decay_schedule(config.swap_probability, config.decay, epoch)
        assignment, swapped = swap_pass(
            per_point, tp, sp,
            np.random.default_rng([config.seed, epoch]),
            assignment, eligible=eligible,
        )
        trace.append(EpochTrace(
            epoch=epoch,
            mean_abs_label_score=float(np.abs(per_label).mean()) if dataset.num_labels else 0.0,
            achieved_test_size=assignment.test_fraction,
            num_swapped=swapped,
        ))
    return assignment, trace
