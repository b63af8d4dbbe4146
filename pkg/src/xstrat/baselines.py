"""Baseline partitioners: uniform random and the greedy iterative method.

The iterative method allocates points one label at a time, rarest label
first, against fractional per-subset budgets.  It is inherently
sequential and known to crawl on very large label spaces, so it accepts
a wall-clock timeout; the random baseline shares the initializer used by
the stratified sampler.
"""

from __future__ import annotations

import time

import numpy as np

from .data import Dataset, SplitAssignment
from .stratified import initialize_split

_TIMEOUT_CHECK_EVERY = 4096


class SplitTimeout(RuntimeError):
    """The iterative method did not finish within the allowed wall time."""


def random_split(num_points: int, target_test_size: float,
                 rng: np.random.Generator) -> SplitAssignment:
    """Uniform random baseline; same contract as the sampler initializer
    (exactly round(n * target) test points, sampled without replacement)."""
    return initialize_split(num_points, target_test_size, rng)


def _label_point_lists(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Inverse mapping label -> points carrying it, ascending per label."""
    point_of_instance = np.repeat(
        np.arange(dataset.num_points, dtype=np.int64), dataset.labels_per_point
    )
    order = np.argsort(dataset.label_ids, kind="stable")
    points = point_of_instance[order]
    indptr = np.zeros(dataset.num_labels + 1, dtype=np.int64)
    np.cumsum(np.bincount(dataset.label_ids, minlength=dataset.num_labels), out=indptr[1:])
    return indptr, points


def iterative_split(dataset: Dataset, target_test_size: float, seed: int = 0,
                    timeout_s: float | None = None) -> SplitAssignment:
    """Greedy iterative stratification for a two-way split.

    Budgets: each subset j in (train, test) wants ``n * proportion_j``
    points overall and ``frequency(l) * proportion_j`` instances of each
    label l, kept as exact fractions.  Repeatedly take the label with the
    fewest unallocated instances (ties broken by a seeded draw over the
    ascending tied ids) and place each of its unallocated points, in
    index order, into the subset with the larger remaining label budget;
    ties fall back to the larger remaining subset budget, then to a
    seeded coin flip.  Every label the point carries pays 1 from its
    budget in the chosen subset.  Points with no labels go last, each to
    the subset with the larger remaining overall budget.

    Raises SplitTimeout when ``timeout_s`` elapses (0 expires at once).
    """
    n = dataset.num_points
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    if not 0.0 < target_test_size < 1.0:
        raise ValueError(f"target_test_size must be in (0,1), got {target_test_size}")
    start = time.monotonic()
    rng = np.random.default_rng(seed)
    t = target_test_size

    c_subset = [n * (1.0 - t), n * t]
    c_label = np.stack([
        dataset.label_frequency * (1.0 - t),
        dataset.label_frequency * t,
    ], axis=1)
    remaining = dataset.label_frequency.astype(np.int64).copy()
    lp_indptr, lp_points = _label_point_lists(dataset)
    allocated = np.zeros(n, dtype=bool)
    flags = np.zeros(n, dtype=np.uint8)
    since_check = 0

    def check_clock() -> None:
        if timeout_s is not None and time.monotonic() - start >= timeout_s:
            raise SplitTimeout(
                f"iterative split did not finish within {timeout_s:g}s")

    check_clock()
    while True:
        active = np.flatnonzero(remaining > 0)
        if len(active) == 0:
            break
        fewest = remaining[active].min()
        tied = active[remaining[active] == fewest]
        label = int(tied[rng.integers(len(tied))]) if len(tied) > 1 else int(tied[0])

        for point in lp_points[lp_indptr[label]:lp_indptr[label + 1]]:
            if allocated[point]:
                continue
            if c_label[label, 0] > c_label[label, 1]:
                j = 0
            elif c_label[label, 0] < c_label[label, 1]:
                j = 1
            elif c_subset[0] > c_subset[1]:
                j = 0
            elif c_subset[0] < c_subset[1]:
                j = 1
            else:
                j = int(rng.integers(2))
            flags[point] = j
            allocated[point] = True
            for other in dataset.labels_of(point):
                c_label[other, j] -= 1.0
                remaining[other] -= 1
            c_subset[j] -= 1.0
            since_check += 1
            if since_check >= _TIMEOUT_CHECK_EVERY:
                since_check = 0
                check_clock()
        check_clock()

    for point in np.flatnonzero(dataset.labels_per_point == 0):
        if c_subset[0] > c_subset[1]:
            j = 0
        elif c_subset[0] < c_subset[1]:
            j = 1
        else:
            j = int(rng.integers(2))
        flags[point] = j
        c_subset[j] -= 1.0

    return SplitAssignment(partition_of=flags, seed=seed)
