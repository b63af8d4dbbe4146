"""Command-line interface: split, evaluate, compare.

Exit codes: 0 success, 1 error, 2 timeout (iterative method only).
Split artifacts (part files, index, trace) are pure functions of the
input file and flags; stdout reports additionally carry wall-clock time.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .baselines import SplitTimeout, iterative_split, random_split
from .data import Dataset, SplitAssignment
from .metrics import UndefinedMetricError, evaluate_split
from .repo_io import (
    ParseError,
    concatenate_provided_split,
    format_assignment_index,
    parse_assignment_index,
    read_dataset,
    write_split,
)
from .stratified import EpochTrace, SamplerConfig, stratified_split

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TIMEOUT = 2

METHODS = ("stratified", "random", "iterative")
TRACE_HEADER = "epoch,mean_abs_label_score,achieved_test_size,num_swapped\n"


def _default_threads() -> int:
    env = os.environ.get("XSTRAT_THREADS")
    if env:
        try:
            return max(int(env), 1)
        except ValueError:
            logger.warning("ignoring non-integer XSTRAT_THREADS=%r", env)
    return os.cpu_count() or 1


def _add_sampler_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--test-size", type=float, required=True,
                   help="target test fraction in (0,1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=SamplerConfig.epochs)
    p.add_argument("--threshold-proportion", type=float,
                   default=SamplerConfig.threshold_proportion)
    p.add_argument("--swap-probability", type=float,
                   default=SamplerConfig.swap_probability)
    p.add_argument("--decay", type=float, default=SamplerConfig.decay)
    p.add_argument("--timeout-mins", type=int, default=None,
                   help="wall-clock budget for the iterative method "
                        "(0 expires immediately; default: none)")


def _add_threads_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (default: $XSTRAT_THREADS or all cores); "
                        "never changes results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xstrat",
        description="Stratified train/test partitioning and evaluation "
                    "for extreme multi-label datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("split", help="partition a dataset")
    sp.add_argument("--input", required=True)
    sp.add_argument("--method", choices=METHODS, required=True)
    _add_sampler_flags(sp)
    sp.add_argument("--out-train")
    sp.add_argument("--out-test")
    sp.add_argument("--out-index")
    sp.add_argument("--trace", help="per-epoch trace CSV (stratified only)")
    _add_threads_flag(sp)

    ev = sub.add_parser("evaluate", help="report metrics for an existing split")
    ev.add_argument("--input", help="full dataset (optional when --train/--test "
                                    "are both given: the pair is the dataset)")
    ev.add_argument("--index", help="assignment index over --input")
    ev.add_argument("--train", help="train part file")
    ev.add_argument("--test", help="test part file")
    ev.add_argument("--hist-csv", help="write the label-proportion histogram here")
    ev.add_argument("--kl-alt", action="store_true",
                    help="also report the smoothed reverse-KL alternative")
    _add_threads_flag(ev)

    cp = sub.add_parser("compare", help="run several methods and tabulate them")
    cp.add_argument("--input", required=True)
    cp.add_argument("--methods", required=True,
                    help="comma-separated subset of: " + ",".join(METHODS))
    _add_sampler_flags(cp)
    _add_threads_flag(cp)
    return parser


def _run_method(method: str, dataset: Dataset, args: argparse.Namespace,
                threads: int) -> tuple[SplitAssignment, list[EpochTrace]]:
    if method == "stratified":
        config = SamplerConfig(
            target_test_size=args.test_size,
            epochs=args.epochs,
            threshold_proportion=args.threshold_proportion,
            swap_probability=args.swap_probability,
            decay=args.decay,
            seed=args.seed,
        )
        return stratified_split(dataset, config, threads=threads)
    if method == "random":
        rng = np.random.default_rng([args.seed, 0])
        assignment = random_split(dataset.num_points, args.test_size, rng)
        return assignment.with_seed(args.seed), []
    if method == "iterative":
        timeout_s = None if args.timeout_mins is None else args.timeout_mins * 60.0
        return iterative_split(dataset, args.test_size, seed=args.seed,
                               timeout_s=timeout_s), []
    raise ValueError(f"unknown method {method!r}")


def _write_trace(path: str, trace: list[EpochTrace]) -> None:
    with open(path, "w", encoding="utf-8") as sink:
        sink.write(TRACE_HEADER)
        for row in trace:
            sink.write(f"{row.epoch},{row.mean_abs_label_score:.10g},"
                       f"{row.achieved_test_size:.10g},{row.num_swapped}\n")


def _cmd_split(args: argparse.Namespace) -> int:
    threads = args.threads or _default_threads()
    dataset = read_dataset(args.input)
    started = time.perf_counter()
    try:
        assignment, trace = _run_method(args.method, dataset, args, threads)
    except SplitTimeout as exc:
        logger.error("%s", exc)
        print(json.dumps({
            "schema_version": 1,
            "method": args.method,
            "status": "did not finish",
            "timeout_mins": args.timeout_mins,
        }, indent=2))
        return EXIT_TIMEOUT
    wall_mins = (time.perf_counter() - started) / 60.0

    if args.out_train or args.out_test:
        if not (args.out_train and args.out_test):
            raise ValueError("--out-train and --out-test go together")
        with open(args.out_train, "w", encoding="utf-8") as train_sink, \
                open(args.out_test, "w", encoding="utf-8") as test_sink:
            write_split(dataset, assignment, train_sink, test_sink)
    if args.out_index:
        Path(args.out_index).write_text(format_assignment_index(assignment),
                                        encoding="utf-8")
    if args.trace:
        _write_trace(args.trace, trace)

    report = evaluate_split(dataset, assignment)
    doc = report.to_dict()
    doc.update({"method": args.method, "seed": args.seed, "wall_mins": wall_mins,
                "status": "ok"})
    print(json.dumps(doc, indent=2))
    logger.info("%s split: %s (%.2f min)", args.method, report.summary_line(), wall_mins)
    return EXIT_OK


def _load_for_evaluate(args: argparse.Namespace) -> tuple[Dataset, SplitAssignment]:
    if args.index:
        if not args.input:
            raise ValueError("--index needs --input")
        if args.train or args.test:
            raise ValueError("give either --index or --train/--test, not both")
        dataset = read_dataset(args.input)
        text = Path(args.index).read_text(encoding="utf-8")
        return dataset, parse_assignment_index(text, dataset.num_points)
    if args.train and args.test:
        dataset, assignment = concatenate_provided_split(
            read_dataset(args.train), read_dataset(args.test))
        if args.input:
            full = read_dataset(args.input)
            if full.num_points != dataset.num_points:
                raise ValueError(
                    f"--input has {full.num_points} points but train+test "
                    f"hold {dataset.num_points}")
            if (full.header_num_labels != dataset.header_num_labels
                    or full.header_num_features != dataset.header_num_features):
                raise ValueError("--input header disagrees with the part files")
            if sorted(full.raw_lines) != sorted(dataset.raw_lines):
                raise ValueError("--input body is not the union of the part files")
        return dataset, assignment
    raise ValueError("need --index, or both --train and --test")


def _cmd_evaluate(args: argparse.Namespace) -> int:
    dataset, assignment = _load_for_evaluate(args)
    report = evaluate_split(dataset, assignment, include_alt_kl=args.kl_alt)
    if args.hist_csv:
        Path(args.hist_csv).write_text(report.histogram.to_csv(), encoding="utf-8")
    print(report.to_json())
    logger.info("evaluate: %s", report.summary_line())
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise ValueError("--methods is empty")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {','.join(METHODS)}")
    threads = args.threads or _default_threads()
    dataset = read_dataset(args.input)

    timed_out = False
    print("method,kl,missing_test_pct,achieved_test_size,wall_mins")
    for method in methods:
        started = time.perf_counter()
        try:
            assignment, _ = _run_method(method, dataset, args, threads)
        except SplitTimeout:
            timed_out = True
            budget = "-" if args.timeout_mins is None else f">{args.timeout_mins}"
            print(f"{method},-,-,-,{budget}")
            logger.error("%s: did not finish", method)
            continue
        wall_mins = (time.perf_counter() - started) / 60.0
        report = evaluate_split(dataset, assignment)
        print(f"{method},{report.kl_divergence:.3f},"
              f"{report.missing_from_test * 100:.1f},"
              f"{report.achieved_test_size:.3f},{wall_mins:.2f}")
    return EXIT_TIMEOUT if timed_out else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "split":
            return _cmd_split(args)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        if args.command == "compare":
            return _cmd_compare(args)
        parser.error(f"unknown command {args.command!r}")
    except (OSError, ParseError, UndefinedMetricError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
