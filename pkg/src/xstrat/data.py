"""In-memory multi-label dataset and train/test partition primitives.

A dataset is an immutable CSR-style label structure (flat label-id array
plus per-point offsets) alongside the verbatim text lines it was parsed
from; an assignment is a flat train/test flag per point.  Label counting
is a single vectorized pass shared by every sampler and metric.

Label ids are dense: ids that never occur in the data are compacted out
at construction and the original ids kept in a side table, so every
label in the working vocabulary has frequency >= 1.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np


class Partition(enum.IntEnum):
    TRAIN = 0
    TEST = 1


TRAIN = Partition.TRAIN
TEST = Partition.TEST

# below this many points sharded counting is pure overhead
_PARALLEL_MIN_POINTS = 2048


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Dataset:
    """A multi-label dataset with opaque per-point feature payloads.

    ``label_ids`` holds the dense label ids of all points back to back,
    sorted and duplicate-free within each point; ``label_indptr[i]`` /
    ``label_indptr[i+1]`` delimit point ``i``.  ``raw_lines`` are the
    body lines exactly as read (or synthesized for in-memory data), so
    splits can be written back byte-identically.
    """

    label_indptr: np.ndarray        # int64, shape (num_points + 1,)
    label_ids: np.ndarray           # int32, dense ids, flat
    label_frequency: np.ndarray     # int64, shape (num_labels,)
    original_label_ids: np.ndarray  # int64, dense id -> id as written in files
    raw_lines: tuple[str, ...]
    payload_start: np.ndarray       # int32, offset of the feature block per line
    header_num_features: int
    header_num_labels: int          # vocabulary size as declared by the source

    @property
    def num_points(self) -> int:
        return len(self.label_indptr) - 1

    @property
    def num_labels(self) -> int:
        """Size of the dense (present-only) label vocabulary."""
        return len(self.label_frequency)

    @property
    def num_label_instances(self) -> int:
        return len(self.label_ids)

    @property
    def labels_per_point(self) -> np.ndarray:
        return np.diff(self.label_indptr)

    def labels_of(self, point: int) -> np.ndarray:
        """Dense label ids of one point (sorted, duplicate-free)."""
        return self.label_ids[self.label_indptr[point]:self.label_indptr[point + 1]]

    def feature_payload(self, point: int) -> str:
        """The raw feature text of one point, verbatim."""
        return self.raw_lines[point][self.payload_start[point]:]

    @classmethod
    def from_label_lists(
        cls,
        labels: Sequence[Iterable[int]],
        num_labels: int | None = None,
        num_features: int = 0,
    ) -> "Dataset":
        """Build a dataset from per-point label-id lists.

        Ids are deduplicated and sorted per point.  ``num_labels`` is the
        declared vocabulary size (defaults to max id + 1); ids outside
        ``[0, num_labels)`` raise.  Canonical comma-list lines are
        synthesized so the dataset can still be written out.
        """
        per_point = [np.unique(np.asarray(list(ls), dtype=np.int64)) for ls in labels]
        max_id = max((int(p[-1]) for p in per_point if len(p)), default=-1)
        if num_labels is None:
            num_labels = max_id + 1
        if max_id >= num_labels:
            raise ValueError(f"label id {max_id} out of range for num_labels={num_labels}")
        if any(len(p) and p[0] < 0 for p in per_point):
            raise ValueError("negative label id")

        counts = np.fromiter((len(p) for p in per_point), dtype=np.int64, count=len(per_point))
        indptr = np.zeros(len(per_point) + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        flat = np.concatenate(per_point) if per_point else np.empty(0, dtype=np.int64)

        raw_lines = tuple(",".join(str(int(l)) for l in p) for p in per_point)
        payload_start = np.fromiter(
            (len(line) for line in raw_lines), dtype=np.int32, count=len(raw_lines)
        )
        return cls._build(indptr, flat.astype(np.int64), num_labels, raw_lines,
                          payload_start, num_features, num_labels)

    @classmethod
    def _build(
        cls,
        indptr: np.ndarray,
        flat_original_ids: np.ndarray,
        original_vocab_size: int,
        raw_lines: tuple[str, ...],
        payload_start: np.ndarray,
        header_num_features: int,
        header_num_labels: int,
    ) -> "Dataset":
        """Compact absent ids out of the vocabulary and assemble."""
        original_freq = np.bincount(flat_original_ids, minlength=original_vocab_size)
        present = np.flatnonzero(original_freq > 0)
        dense_of = np.full(original_vocab_size, -1, dtype=np.int32)
        dense_of[present] = np.arange(len(present), dtype=np.int32)
        dense_flat = dense_of[flat_original_ids] if len(flat_original_ids) else \
            np.empty(0, dtype=np.int32)
        return cls(
            label_indptr=_frozen(indptr.astype(np.int64)),
            label_ids=_frozen(dense_flat.astype(np.int32)),
            label_frequency=_frozen(original_freq[present].astype(np.int64)),
            original_label_ids=_frozen(present.astype(np.int64)),
            raw_lines=raw_lines,
            payload_start=_frozen(payload_start.astype(np.int32)),
            header_num_features=header_num_features,
            header_num_labels=header_num_labels,
        )


@dataclass
class SplitAssignment:
    """Per-point train/test flags plus the seed that produced them.

    ``seed`` is None for splits loaded from external files.
    """

    partition_of: np.ndarray  # uint8, Partition values
    seed: int | None = None

    def __post_init__(self) -> None:
        given = np.asarray(self.partition_of)
        if given.dtype.kind not in "iub":
            raise ValueError(f"partition flags must be integers, got {given.dtype}")
        if given.ndim != 1:
            raise ValueError("partition_of must be one-dimensional")
        if len(given) and (given.min() < 0 or given.max() > 1):
            raise ValueError("partition flags must be TRAIN (0) or TEST (1)")
        self.partition_of = _frozen(given.astype(np.uint8))

    @property
    def num_points(self) -> int:
        return len(self.partition_of)

    @property
    def num_test(self) -> int:
        return int(self.partition_of.sum())

    @property
    def num_train(self) -> int:
        return self.num_points - self.num_test

    @property
    def test_fraction(self) -> float:
        return self.num_test / self.num_points if self.num_points else 0.0

    def test_indices(self) -> np.ndarray:
        return np.flatnonzero(self.partition_of == TEST)

    def train_indices(self) -> np.ndarray:
        return np.flatnonzero(self.partition_of == TRAIN)

    def with_seed(self, seed: int | None) -> "SplitAssignment":
        return replace(self, partition_of=self.partition_of, seed=seed)


@dataclass(frozen=True)
class LabelCounts:
    """Per-label instance tallies under one assignment."""

    train_count: np.ndarray
    test_count: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.train_count + self.test_count

    @property
    def num_labels(self) -> int:
        return len(self.train_count)


def _check_lengths(dataset: Dataset, assignment: SplitAssignment) -> None:
    if assignment.num_points != dataset.num_points:
        raise ValueError(
            f"assignment covers {assignment.num_points} points, "
            f"dataset has {dataset.num_points}"
        )


def _tally_test_range(dataset: Dataset, part: np.ndarray, lo: int, hi: int) -> np.ndarray:
    i0, i1 = dataset.label_indptr[lo], dataset.label_indptr[hi]
    widths = np.diff(dataset.label_indptr[lo:hi + 1])
    in_test = np.repeat(part[lo:hi] == TEST, widths)
    return np.bincount(dataset.label_ids[i0:i1][in_test],
                       minlength=dataset.num_labels).astype(np.int64)


def _shard_bounds(n: int, threads: int) -> np.ndarray:
    return np.linspace(0, n, threads + 1).astype(np.int64)


def count_labels(dataset: Dataset, assignment: SplitAssignment,
                 threads: int = 1) -> LabelCounts:
    """Tally each label's train and test instances.

    With ``threads > 1`` the tally is sharded over contiguous point
    ranges and merged; integer merges make the result identical to the
    sequential pass.
    """
    _check_lengths(dataset, assignment)
    part = assignment.partition_of
    n = dataset.num_points
    if threads <= 1 or n < _PARALLEL_MIN_POINTS:
        test = _tally_test_range(dataset, part, 0, n)
    else:
        bounds = _shard_bounds(n, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            shards = list(pool.map(
                lambda lh: _tally_test_range(dataset, part, lh[0], lh[1]),
                zip(bounds[:-1], bounds[1:]),
            ))
        test = np.sum(shards, axis=0, dtype=np.int64) if shards else \
            np.zeros(dataset.num_labels, dtype=np.int64)
    train = dataset.label_frequency - test
    return LabelCounts(train_count=_frozen(train), test_count=_frozen(test))


def actual_test_proportions(counts: LabelCounts) -> np.ndarray:
    """Fraction of each label's instances currently assigned to test.

    Every label must have at least one instance; zero-total labels are
    compacted out of the vocabulary at construction, so hitting one here
    means the counts do not belong to this vocabulary.
    """
    total = counts.total
    if len(total) and total.min() <= 0:
        raise ValueError("label with zero instances in counts; "
                         "absent labels must be compacted out before scoring")
    return counts.test_count / total
