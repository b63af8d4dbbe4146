"""Evaluation quantities for a train/test partition.

KL divergence of the test-set label distribution against the full
dataset's, missing-label fractions per partition, a 10-bin histogram of
per-label test proportions with a head/tail breakdown, and the basic
dataset statistics.  Everything is a pure function of (dataset,
assignment); absent labels are already compacted out of the vocabulary,
so every denominator here counts present labels only.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .data import (
    Dataset,
    LabelCounts,
    Partition,
    SplitAssignment,
    TEST,
    count_labels,
)

SCHEMA_VERSION = 1
TAIL_THRESHOLD = 10  # a label is "tail" below this many instances overall


class UndefinedMetricError(ValueError):
    """The metric has no value for this partition (e.g. empty test set)."""


def _counts(dataset: Dataset, assignment: SplitAssignment,
            counts: LabelCounts | None) -> LabelCounts:
    return counts if counts is not None else count_labels(dataset, assignment)


def kl_divergence(dataset: Dataset, assignment: SplitAssignment,
                  counts: LabelCounts | None = None) -> float:
    """KL(test || full) over label distributions, in nats.

    q = test-set label relative frequencies, p = whole-dataset relative
    frequencies; terms with q = 0 contribute nothing, and p > 0 holds for
    every label in the vocabulary, so the value is always finite.
    """
    counts = _counts(dataset, assignment, counts)
    test_total = int(counts.test_count.sum())
    if test_total == 0:
        raise UndefinedMetricError("test set holds no label instances")
    p = dataset.label_frequency / dataset.label_frequency.sum()
    q = counts.test_count / test_total
    support = q > 0
    # KL is nonnegative; clamp summation rounding noise at the floor.
    return max(float(np.sum(q[support] * np.log(q[support] / p[support]))), 0.0)


def kl_divergence_smoothed(dataset: Dataset, assignment: SplitAssignment,
                           eps: float = 1e-6,
                           counts: LabelCounts | None = None) -> float:
    """Alternative reading: KL(full || test) with add-eps smoothing of the
    test distribution, finite even when test labels are missing."""
    counts = _counts(dataset, assignment, counts)
    test_total = int(counts.test_count.sum())
    if test_total == 0:
        raise UndefinedMetricError("test set holds no label instances")
    p = dataset.label_frequency / dataset.label_frequency.sum()
    q = (counts.test_count + eps) / (test_total + eps * dataset.num_labels)
    return max(float(np.sum(p * np.log(p / q))), 0.0)


def missing_label_fraction(counts: LabelCounts,
                           which: Partition = TEST) -> float:
    """Fraction of (present) labels with zero instances in one partition."""
    arr = counts.test_count if which == TEST else counts.train_count
    if len(arr) == 0:
        return 0.0
    return float((arr == 0).mean())


@dataclass(frozen=True)
class HistogramReport:
    """Per-label test-proportion histogram, split head/tail.

    ``bin_edges`` has num_bins + 1 entries; every bin is half-open except
    the last, which is closed so a label fully in test lands in it.
    ``reference_test_size`` is the achieved test fraction (the red-line
    value a perfectly stratified split would concentrate on).
    """

    bin_edges: list[float]
    head_counts: list[int]
    tail_counts: list[int]
    head_fractions: list[float]
    tail_fractions: list[float]
    reference_test_size: float

    @property
    def num_bins(self) -> int:
        return len(self.head_counts)

    def total_labels(self) -> int:
        return sum(self.head_counts) + sum(self.tail_counts)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("bin_low,bin_high,head_count,tail_count,head_frac,tail_frac\n")
        for b in range(self.num_bins):
            out.write(
                f"{self.bin_edges[b]:g},{self.bin_edges[b + 1]:g},"
                f"{self.head_counts[b]},{self.tail_counts[b]},"
                f"{self.head_fractions[b]:.6g},{self.tail_fractions[b]:.6g}\n"
            )
        return out.getvalue()


def proportion_histogram(dataset: Dataset, assignment: SplitAssignment,
                         num_bins: int = 10, tail_threshold: int = TAIL_THRESHOLD,
                         counts: LabelCounts | None = None) -> HistogramReport:
    """Bin each label's test proportion; count heads and tails separately.

    Binning runs on integer counts, (test * num_bins) // total, clamped
    into the closed last bin, so exact boundary proportions like 3/10
    never float below their bin edge.
    """
    counts = _counts(dataset, assignment, counts)
    total = counts.total
    if (total <= 0).any():
        raise ValueError("zero-total label in counts")
    bins = np.minimum(counts.test_count * num_bins // np.maximum(total, 1),
                      num_bins - 1).astype(np.int64)
    tail = dataset.label_frequency < tail_threshold
    head_counts = np.bincount(bins[~tail], minlength=num_bins)
    tail_counts = np.bincount(bins[tail], minlength=num_bins)
    num_labels = max(dataset.num_labels, 1)
    return HistogramReport(
        bin_edges=[b / num_bins for b in range(num_bins + 1)],
        head_counts=head_counts.tolist(),
        tail_counts=tail_counts.tolist(),
        head_fractions=(head_counts / num_labels).tolist(),
        tail_fractions=(tail_counts / num_labels).tolist(),
        reference_test_size=assignment.test_fraction,
    )


@dataclass(frozen=True)
class DatasetStats:
    """Table-style dataset statistics; averages are over the full dataset."""

    num_labels: int
    num_train: int
    num_test: int
    avg_labels_per_sample: float
    avg_samples_per_label: float
    tail_label_fraction: float


def dataset_stats(dataset: Dataset, assignment: SplitAssignment,
                  tail_threshold: int = TAIL_THRESHOLD) -> DatasetStats:
    total_instances = int(dataset.label_frequency.sum())
    return DatasetStats(
        num_labels=dataset.num_labels,
        num_train=assignment.num_train,
        num_test=assignment.num_test,
        avg_labels_per_sample=total_instances / dataset.num_points if dataset.num_points else 0.0,
        avg_samples_per_label=total_instances / dataset.num_labels if dataset.num_labels else 0.0,
        tail_label_fraction=float((dataset.label_frequency < tail_threshold).mean())
        if dataset.num_labels else 0.0,
    )


@dataclass(frozen=True)
class SplitReport:
    """Everything the evaluate command reports for one partition."""

    kl_divergence: float
    missing_from_test: float
    missing_from_train: float
    achieved_test_size: float
    histogram: HistogramReport
    dataset_stats: DatasetStats
    kl_divergence_alt: float | None = None

    def to_dict(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kl_divergence": self.kl_divergence,
            "missing_from_test": self.missing_from_test,
            "missing_from_train": self.missing_from_train,
            "achieved_test_size": self.achieved_test_size,
            "dataset_stats": {
                "num_labels": self.dataset_stats.num_labels,
                "num_train": self.dataset_stats.num_train,
                "num_test": self.dataset_stats.num_test,
                "avg_labels_per_sample": self.dataset_stats.avg_labels_per_sample,
                "avg_samples_per_label": self.dataset_stats.avg_samples_per_label,
                "tail_label_fraction": self.dataset_stats.tail_label_fraction,
            },
            "histogram": {
                "bin_edges": self.histogram.bin_edges,
                "head_counts": self.histogram.head_counts,
                "tail_counts": self.histogram.tail_counts,
                "head_fractions": self.histogram.head_fractions,
                "tail_fractions": self.histogram.tail_fractions,
                "reference_test_size": self.histogram.reference_test_size,
            },
        }
        if self.kl_divergence_alt is not None:
            doc["kl_divergence_alt"] = self.kl_divergence_alt
        return doc

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def summary_line(self) -> str:
        """One human line, percentages to one decimal place."""
        return (
            f"kl={self.kl_divergence:.3f} "
            f"missing_test={self.missing_from_test * 100:.1f}% "
            f"missing_train={self.missing_from_train * 100:.1f}% "
            f"test_size={self.achieved_test_size * 100:.1f}%"
        )


def evaluate_split(dataset: Dataset, assignment: SplitAssignment,
                   num_bins: int = 10, tail_threshold: int = TAIL_THRESHOLD,
                   include_alt_kl: bool = False) -> SplitReport:
    counts = count_labels(dataset, assignment)
    return SplitReport(
        kl_divergence=kl_divergence(dataset, assignment, counts=counts),
        missing_from_test=missing_label_fraction(counts, TEST),
        missing_from_train=missing_label_fraction(counts, Partition.TRAIN),
        achieved_test_size=assignment.test_fraction,
        histogram=proportion_histogram(dataset, assignment, num_bins,
                                       tail_threshold, counts=counts),
        dataset_stats=dataset_stats(dataset, assignment, tail_threshold),
        kl_divergence_alt=kl_divergence_smoothed(dataset, assignment, counts=counts)
        if include_alt_kl else None,
    )
