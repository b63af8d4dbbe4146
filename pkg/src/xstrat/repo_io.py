"""Reading and writing datasets and splits in the XML-repository text format.

The format: a header line ``num_points num_features num_labels`` followed
by one line per point, ``l1,l2,...,lk f1:v1 f2:v2 ...``.  The label list
may be empty, in which case the line starts with a space or directly with
the feature block.  Feature text is opaque here: body lines are kept
verbatim so written splits are byte-identical to their inputs.

Splits travel either as two repo-format files or as a one-flag-per-line
assignment index (``0`` = train, ``1`` = test).
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import TextIO

import numpy as np

from .data import Dataset, SplitAssignment, TEST

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    """Malformed input; ``line_number`` is 1-based, counting the header."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def _read_lines(stream: TextIO) -> list[str]:
    text = stream.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def _feature_start(line: str) -> int:
    """Offset of the first space-delimited token containing ':'.

    ``len(line)`` when the whole line is labels (no feature block).
    """
    pos = 0
    n = len(line)
    while pos < n:
        end = line.find(" ", pos)
        if end == -1:
            end = n
        if ":" in line[pos:end]:
            return pos
        pos = end + 1
    return n


def _parse_label_region(region: str, line_number: int, num_labels: int) -> list[int]:
    text = region.strip()
    if not text:
        return []
    ids = []
    for chunk in text.split():
        for piece in chunk.split(","):
            try:
                label = int(piece)
            except ValueError:
                raise ParseError(line_number, f"non-integer label {piece!r}") from None
            if label < 0 or label >= num_labels:
                raise ParseError(
                    line_number,
                    f"label id {label} outside [0, {num_labels})",
                )
            ids.append(label)
    return ids


def parse_repo_format(stream: TextIO) -> Dataset:
    """Parse a repo-format stream into a Dataset.

    Labels occurring zero times in the body stay in the side table but
    are excluded from the dense vocabulary (and so from every metric
    denominator).  Duplicate labels on a line are deduplicated with one
    summary warning per stream.
    """
    lines = _read_lines(stream)
    if not lines:
        raise ParseError(1, "missing header")
    header = lines[0].split()
    if len(header) != 3:
        raise ParseError(1, f"header must be 'num_points num_features num_labels', got {lines[0]!r}")
    try:
        num_points, num_features, num_labels = (int(tok) for tok in header)
    except ValueError:
        raise ParseError(1, f"non-integer header field in {lines[0]!r}") from None
    if min(num_points, num_features, num_labels) < 0:
        raise ParseError(1, "negative header field")

    body = lines[1:]
    if len(body) != num_points:
        bad_line = num_points + 2 if len(body) > num_points else len(lines) + 1
        raise ParseError(
            bad_line,
            f"header declares {num_points} points but body has {len(body)} lines",
        )

    indptr = np.zeros(num_points + 1, dtype=np.int64)
    flat: list[np.ndarray] = []
    payload_start = np.zeros(num_points, dtype=np.int32)
    dup_lines = 0
    first_dup_line = 0
    for i, line in enumerate(body):
        start = _feature_start(line)
        payload_start[i] = start
        ids = _parse_label_region(line[:start], i + 2, num_labels)
        uniq = np.unique(np.asarray(ids, dtype=np.int64))
        if len(uniq) != len(ids):
            dup_lines += 1
            if not first_dup_line:
                first_dup_line = i + 2
        flat.append(uniq)
        indptr[i + 1] = indptr[i] + len(uniq)
    if dup_lines:
        logger.warning(
            "deduplicated repeated labels on %d line(s) (first at line %d)",
            dup_lines, first_dup_line,
        )

    flat_ids = np.concatenate(flat) if flat else np.empty(0, dtype=np.int64)
    return Dataset._build(
        indptr=indptr,
        flat_original_ids=flat_ids,
        original_vocab_size=num_labels,
        raw_lines=tuple(body),
        payload_start=payload_start,
        header_num_features=num_features,
        header_num_labels=num_labels,
    )


def read_dataset(path: str | Path) -> Dataset:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_repo_format(handle)


def _write_part(dataset: Dataset, points: np.ndarray, sink: TextIO) -> None:
    sink.write(f"{len(points)} {dataset.header_num_features} {dataset.header_num_labels}\n")
    raw = dataset.raw_lines
    for i in points:
        sink.write(raw[i])
        sink.write("\n")


def write_split(dataset: Dataset, assignment: SplitAssignment,
                train_sink: TextIO, test_sink: TextIO) -> None:
    """Write the two partitions as repo-format files.

    Body lines are emitted verbatim, in their original relative order;
    each header carries the partition's point count and the source's
    num_features / num_labels.
    """
    if assignment.num_points != dataset.num_points:
        raise ValueError("assignment does not match dataset")
    _write_part(dataset, assignment.train_indices(), train_sink)
    _write_part(dataset, assignment.test_indices(), test_sink)


def write_repo_format(dataset: Dataset, sink: TextIO) -> None:
    """Write the whole dataset back out (header + verbatim body)."""
    _write_part(dataset, np.arange(dataset.num_points), sink)


def format_assignment_index(assignment: SplitAssignment) -> str:
    """One flag per line: ``0`` = train, ``1`` = test."""
    return "".join("1\n" if p == TEST else "0\n" for p in assignment.partition_of)


def parse_assignment_index(text: str, num_points: int) -> SplitAssignment:
    tokens = text.split()
    if len(tokens) != num_points:
        raise ParseError(
            len(tokens) + 1,
            f"index holds {len(tokens)} flags, expected {num_points}",
        )
    flags = np.empty(num_points, dtype=np.uint8)
    for i, tok in enumerate(tokens):
        if tok == "0":
            flags[i] = 0
        elif tok == "1":
            flags[i] = 1
        else:
            raise ParseError(i + 1, f"bad partition flag {tok!r} (want '0' or '1')")
    return SplitAssignment(partition_of=flags, seed=None)


def concatenate_provided_split(train: Dataset, test: Dataset) -> tuple[Dataset, SplitAssignment]:
    """Rebuild the full dataset from a provided train/test file pair.

    Points are ordered train-then-test and the matching assignment is
    returned; headers must agree on num_features and num_labels.
    """
    if (train.header_num_labels != test.header_num_labels
            or train.header_num_features != test.header_num_features):
        raise ValueError(
            "train/test headers disagree: "
            f"features {train.header_num_features} vs {test.header_num_features}, "
            f"labels {train.header_num_labels} vs {test.header_num_labels}"
        )
    n_train, n_test = train.num_points, test.num_points
    indptr = np.concatenate([
        train.label_indptr,
        test.label_indptr[1:] + train.label_indptr[-1],
    ])
    # back to original ids so the combined vocabulary compacts consistently
    flat = np.concatenate([
        train.original_label_ids[train.label_ids],
        test.original_label_ids[test.label_ids],
    ])
    payload_start = np.concatenate([train.payload_start, test.payload_start])
    dataset = Dataset._build(
        indptr=indptr,
        flat_original_ids=flat.astype(np.int64),
        original_vocab_size=train.header_num_labels,
        raw_lines=train.raw_lines + test.raw_lines,
        payload_start=payload_start,
        header_num_features=train.header_num_features,
        header_num_labels=train.header_num_labels,
    )
    flags = np.concatenate([
        np.zeros(n_train, dtype=np.uint8),
        np.ones(n_test, dtype=np.uint8),
    ])
    return dataset, SplitAssignment(partition_of=flags, seed=None)
