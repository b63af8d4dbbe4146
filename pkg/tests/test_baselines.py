"""Random and iterative baselines against an independent reference."""

import numpy as np
import pytest

from xstrat import (
    Dataset,
    SplitTimeout,
    iterative_split,
    random_split,
)

from _reference import reference_iterative_split
from conftest import power_law_dataset


def _tiny_instance(rng, max_points=12, max_labels=4):
    """Random small multi-label instance without duplicate labels per point."""
    n = int(rng.integers(2, max_points + 1))
    num_labels = int(rng.integers(1, max_labels + 1))
    while True:
        lists = []
        for _ in range(n):
            k = int(rng.integers(0, min(num_labels, 3) + 1))
            lists.append(sorted(rng.choice(num_labels, size=k, replace=False).tolist()))
        if any(lists):
            return lists, num_labels


def test_random_split_size_and_determinism():
    for n, t, want_test in [(10, 0.25, 3), (10, 0.2, 2), (7, 0.5, 4), (19348, 0.2, 3870)]:
        asg = random_split(n, t, np.random.default_rng([7, 0]))
        assert asg.num_test == want_test
        again = random_split(n, t, np.random.default_rng([7, 0]))
        assert np.array_equal(asg.partition_of, again.partition_of)
        other = random_split(n, t, np.random.default_rng([8, 0]))
        if n > 20:
            assert not np.array_equal(asg.partition_of, other.partition_of)


def test_random_split_rejects_degenerate_targets():
    rng = np.random.default_rng(0)
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            random_split(10, bad, np.random.default_rng(0))
    with pytest.raises(ValueError):
        random_split(0, 0.5, rng)


def test_iterative_matches_reference_on_small_instances():
    rng = np.random.default_rng(2024)
    for case in range(20):
        lists, num_labels = _tiny_instance(rng)
        seed = int(rng.integers(0, 1000))
        t = float(rng.uniform(0.15, 0.6))
        ds = Dataset.from_label_lists(lists, num_labels=num_labels)
        got = iterative_split(ds, t, seed=seed)
        want = reference_iterative_split(lists, num_labels, t, seed)
        assert got.partition_of.tolist() == want, (
            f"case {case}: lists={lists} t={t} seed={seed}")


def test_iterative_deterministic_and_seed_sensitive():
    ds = power_law_dataset(300, 40, seed=31)
    a = iterative_split(ds, 0.3, seed=5)
    b = iterative_split(ds, 0.3, seed=5)
    assert np.array_equal(a.partition_of, b.partition_of)
    assert a.seed == 5
    c = iterative_split(ds, 0.3, seed=6)
    assert not np.array_equal(a.partition_of, c.partition_of)


def test_iterative_test_size_near_target():
    ds = power_law_dataset(500, 60, seed=32)
    for t in (0.2, 0.3, 0.5):
        asg = iterative_split(ds, t, seed=0)
        assert abs(asg.num_test - 500 * t) <= 3


def test_iterative_empty_label_points_balance_subsets():
    lists = [[0]] * 4 + [[]] * 6
    ds = Dataset.from_label_lists(lists, num_labels=1)
    asg = iterative_split(ds, 0.5, seed=3)
    assert asg.num_test == 5
    assert sorted(asg.partition_of[:4].tolist()) == [0, 0, 1, 1]


def test_iterative_timeout_zero_raises_immediately():
    ds = power_law_dataset(50, 8, seed=33)
    with pytest.raises(SplitTimeout):
        iterative_split(ds, 0.3, seed=0, timeout_s=0)


def test_iterative_timeout_generous_completes():
    ds = power_law_dataset(50, 8, seed=34)
    asg = iterative_split(ds, 0.3, seed=0, timeout_s=60.0)
    no_limit = iterative_split(ds, 0.3, seed=0, timeout_s=None)
    assert np.array_equal(asg.partition_of, no_limit.partition_of)


def test_iterative_rejects_degenerate_inputs():
    ds = power_law_dataset(20, 5, seed=35)
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError):
            iterative_split(ds, bad, seed=0)
