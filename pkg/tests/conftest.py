"""Shared fixtures and synthetic dataset builders.

Reference-corpus tests (EURLex-4K, Wiki10-31K) only run when the part
files are present; point XSTRAT_EURLEX_DIR / XSTRAT_WIKI10_DIR at a
directory holding them, or drop them under data/eurlex (data/wiki10)
as train.txt and test.txt.  Everything else is fully synthetic.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from xstrat import Dataset, concatenate_provided_split, read_dataset

_PART_NAMES = (
    ("train.txt", "test.txt"),
    ("eurlex_train.txt", "eurlex_test.txt"),
    ("wiki10_train.txt", "wiki10_test.txt"),
)


def _find_parts(env_var: str, default_subdir: str) -> tuple[Path, Path] | None:
    root = os.environ.get(env_var)
    base = Path(root) if root else Path(__file__).resolve().parent.parent / "data" / default_subdir
    for train_name, test_name in _PART_NAMES:
        train, test = base / train_name, base / test_name
        if train.is_file() and test.is_file():
            return train, test
    return None


def power_law_label_lists(num_points: int, num_labels: int, seed: int,
                          max_labels: int = 6, allow_empty: bool = True) -> list[list[int]]:
    """Per-point label lists with a long-tailed label popularity curve."""
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, num_labels + 1, dtype=np.float64)
    cdf = np.cumsum(weights / weights.sum())
    low = 0 if allow_empty else 1
    out = []
    for _ in range(num_points):
        k = int(rng.integers(low, max_labels + 1))
        drawn = np.searchsorted(cdf, rng.random(k))
        out.append(sorted(set(drawn.tolist())))
    return out


def power_law_dataset(num_points: int, num_labels: int, seed: int,
                      max_labels: int = 6, allow_empty: bool = True) -> Dataset:
    lists = power_law_label_lists(num_points, num_labels, seed,
                                  max_labels=max_labels, allow_empty=allow_empty)
    return Dataset.from_label_lists(lists, num_labels=num_labels)


def single_label_dataset(num_classes: int, num_points: int, seed: int) -> Dataset:
    """One label per point; every class holds at least 30 points."""
    assert num_points >= 30 * num_classes
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(num_classes))
    sizes = 30 + rng.multinomial(num_points - 30 * num_classes, probs)
    labels = np.repeat(np.arange(num_classes), sizes)
    rng.shuffle(labels)
    return Dataset.from_label_lists([[int(l)] for l in labels],
                                    num_labels=num_classes)


def repo_text(label_lists: list[list[int]], num_features: int,
              num_labels: int, seed: int = 0) -> str:
    """Serialize label lists as dataset-repository text with fake features."""
    rng = np.random.default_rng(seed)
    lines = [f"{len(label_lists)} {num_features} {num_labels}"]
    for labels in label_lists:
        ids = sorted(rng.choice(num_features, size=min(3, num_features),
                                replace=False).tolist())
        payload = " ".join(f"{i}:{rng.random():.6f}" for i in ids)
        lines.append(",".join(map(str, labels)) + " " + payload)
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def eurlex_paths() -> tuple[Path, Path]:
    found = _find_parts("XSTRAT_EURLEX_DIR", "eurlex")
    if found is None:
        pytest.skip("EURLex-4K part files not present; set XSTRAT_EURLEX_DIR "
                    "or place train.txt/test.txt under data/eurlex/")
    return found


@pytest.fixture(scope="session")
def eurlex(eurlex_paths):
    """(dataset, provided split assignment) for EURLex-4K."""
    train, test = eurlex_paths
    return concatenate_provided_split(read_dataset(train), read_dataset(test))


@pytest.fixture(scope="session")
def wiki10():
    found = _find_parts("XSTRAT_WIKI10_DIR", "wiki10")
    if found is None:
        pytest.skip("Wiki10-31K part files not present; set XSTRAT_WIKI10_DIR "
                    "or place train.txt/test.txt under data/wiki10/")
    train, test = found
    return concatenate_provided_split(read_dataset(train), read_dataset(test))
