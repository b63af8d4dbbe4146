"""Dataset-repository text format: parsing, writing, assignment indexes."""

import io
import logging

import numpy as np
import pytest

from xstrat import (
    ParseError,
    SplitAssignment,
    concatenate_provided_split,
    count_labels,
    format_assignment_index,
    parse_assignment_index,
    parse_repo_format,
    write_repo_format,
    write_split,
)

from conftest import power_law_label_lists, repo_text

SAMPLE = (
    "4 6 5\n"
    "0,2 0:1.5 3:0.25\n"
    "4 1:2 2:1 5:0.5\n"
    " 0:1\n"
    "2,0,4 5:1\n"
)


def test_parse_sample():
    ds = parse_repo_format(io.StringIO(SAMPLE))
    assert ds.num_points == 4
    assert ds.header_num_features == 6
    assert ds.header_num_labels == 5
    assert ds.num_labels == 3
    assert ds.original_label_ids.tolist() == [0, 2, 4]
    assert ds.labels_of(0).tolist() == [0, 1]
    assert ds.labels_of(1).tolist() == [2]
    assert ds.labels_of(2).tolist() == []
    assert ds.labels_of(3).tolist() == [0, 1, 2]
    assert ds.feature_payload(0) == "0:1.5 3:0.25"
    assert ds.feature_payload(2) == "0:1"
    assert ds.label_frequency.tolist() == [2, 2, 2]


def test_write_is_byte_identical():
    sink = io.StringIO()
    write_repo_format(parse_repo_format(io.StringIO(SAMPLE)), sink)
    assert sink.getvalue() == SAMPLE


def test_crlf_accepted():
    ds = parse_repo_format(io.StringIO(SAMPLE.replace("\n", "\r\n")))
    assert ds.num_points == 4
    assert ds.feature_payload(0) == "0:1.5 3:0.25"


def test_duplicate_labels_warn_once(caplog):
    text = "2 3 3\n0,0,1 0:1\n2,2 1:1\n"
    with caplog.at_level(logging.WARNING):
        ds = parse_repo_format(io.StringIO(text))
    warnings = [r for r in caplog.records if "duplicate" in r.getMessage()]
    assert len(warnings) == 1
    assert ds.labels_of(0).tolist() == [0, 1]
    assert ds.labels_of(1).tolist() == [2]


@pytest.mark.parametrize("text,bad_line", [
    ("", 1),
    ("1 2\n 0:1\n", 1),
    ("a 2 3\n 0:1\n", 1),
    ("1 2 3 4\n 0:1\n", 1),
    ("-1 2 3\n", 1),
    ("1 2 3\n5 0:1\n", 2),
    ("1 2 3\nx 0:1\n", 2),
    ("2 2 3\n0 0:1\n", 3),
    ("1 2 3\n0 0:1\n1 0:1\n", 3),
])
def test_parse_errors_carry_line_numbers(text, bad_line):
    with pytest.raises(ParseError) as exc:
        parse_repo_format(io.StringIO(text))
    assert exc.value.line_number == bad_line
    assert f"line {bad_line}" in str(exc.value)


def test_write_split_headers_and_order():
    ds = parse_repo_format(io.StringIO(SAMPLE))
    asg = SplitAssignment(partition_of=np.array([1, 0, 0, 1], dtype=np.uint8))
    train, test = io.StringIO(), io.StringIO()
    write_split(ds, asg, train, test)
    assert train.getvalue() == "2 6 5\n4 1:2 2:1 5:0.5\n 0:1\n"
    assert test.getvalue() == "2 6 5\n0,2 0:1.5 3:0.25\n2,0,4 5:1\n"


def test_assignment_index_roundtrip():
    asg = SplitAssignment(partition_of=np.array([1, 0, 1], dtype=np.uint8))
    text = format_assignment_index(asg)
    assert text == "1\n0\n1\n"
    back = parse_assignment_index(text, 3)
    assert np.array_equal(back.partition_of, asg.partition_of)


@pytest.mark.parametrize("text,num_points", [
    ("1\n0\n", 3),
    ("1\n0\n1\n0\n", 3),
    ("1\n2\n0\n", 3),
    ("1\nhmm\n0\n", 3),
])
def test_assignment_index_errors(text, num_points):
    with pytest.raises(ParseError):
        parse_assignment_index(text, num_points)


def test_concatenate_provided_split_rebuilds_metrics():
    lists = power_law_label_lists(200, 30, seed=9, allow_empty=True)
    full_text = repo_text(lists, num_features=10, num_labels=30)
    ds = parse_repo_format(io.StringIO(full_text))
    rng = np.random.default_rng(10)
    asg = SplitAssignment(partition_of=rng.integers(0, 2, 200).astype(np.uint8))

    train, test = io.StringIO(), io.StringIO()
    write_split(ds, asg, train, test)
    train_ds = parse_repo_format(io.StringIO(train.getvalue()))
    test_ds = parse_repo_format(io.StringIO(test.getvalue()))
    merged, merged_asg = concatenate_provided_split(train_ds, test_ds)

    assert merged.num_points == 200
    assert merged_asg.num_test == asg.num_test
    want = count_labels(ds, asg)
    got = count_labels(merged, merged_asg)
    assert sorted(zip(want.total.tolist(), want.test_count.tolist())) == \
        sorted(zip(got.total.tolist(), got.test_count.tolist()))


def test_concatenate_rejects_header_mismatch():
    a = parse_repo_format(io.StringIO("1 2 3\n0 0:1\n"))
    b = parse_repo_format(io.StringIO("1 2 4\n0 0:1\n"))
    with pytest.raises(ValueError):
        concatenate_provided_split(a, b)
