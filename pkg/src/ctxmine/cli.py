"""Batch front end: the same pipeline as the service, for scripts and tests.

Exit codes: 0 success, 1 validation or parse failure, 2 I/O failure,
64 bad usage.  Output (STC JSON or DOT) goes to --out or stdout; warnings go
to stderr as one JSON object per line, so stdout stays byte-clean for
golden-file comparisons.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from .contextgraph import export_dot
from .diagnostics import CtxmineError
from .pipeline import run_pipeline
from .stc import serialize_stc

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_IO = 2
EXIT_USAGE = 64


class _ArgumentParser(argparse.ArgumentParser):
    """argparse with the conventional 64 exit code for usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="ctxmine",
        description=(
            "Mine task-influencing contexts from a contextual dataset and "
            "emit the standardized task-specific contexts document or a DOT "
            "rendering of the context model."
        ),
    )
    parser.add_argument("--dataset", required=True, help="dataset CSV file")
    parser.add_argument("--metadata", required=True, help="metadata CSV file")
    parser.add_argument("--task", required=True, help="name of the user task")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument(
        "--format", choices=("stc", "dot"), default="stc", help="output format"
    )
    parser.add_argument(
        "--pretty", action="store_true", help="indent STC output for human eyes"
    )
    tuning = parser.add_argument_group("processor configuration overrides")
    tuning.add_argument("--alpha", type=float, help="significance level")
    tuning.add_argument("--min-effect-size", type=float, help="minimum Cramér's V")
    tuning.add_argument(
        "--residual-threshold", type=float, help="instance-level residual cutoff"
    )
    tuning.add_argument(
        "--min-pair-support", type=int, help="minimum joint observation count"
    )
    tuning.add_argument(
        "--min-path-support", type=int, help="minimum rows matching a whole path"
    )
    tuning.add_argument(
        "--max-instances", type=int, help="exclude columns above this cardinality"
    )
    tuning.add_argument("--max-path-length", type=int, help="longest allowed context")
    tuning.add_argument("--bins", type=int, help="default bin count for numeric columns")
    return parser


def _collect_overrides(args: argparse.Namespace) -> dict[str, str]:
    overrides = {}
    for name in (
        "alpha",
        "min_effect_size",
        "residual_threshold",
        "min_pair_support",
        "min_path_support",
        "max_instances",
        "max_path_length",
        "bins",
    ):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = repr(value) if isinstance(value, float) else str(value)
    return overrides


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        with open(args.metadata, "rb") as handle:
            metadata_data = handle.read()
        with open(args.dataset, "rb") as handle:
            dataset_data = handle.read()
    except OSError as exc:
        print(f"ctxmine: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        result = run_pipeline(
            metadata_data, dataset_data, args.task, _collect_overrides(args)
        )
    except CtxmineError as exc:
        print(f"ctxmine: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    for warning in result.warnings:
        print(json.dumps(asdict(warning), ensure_ascii=False), file=sys.stderr)

    if args.format == "dot":
        output = export_dot(result.graph).encode("utf-8")
    else:
        output = serialize_stc(result.document, pretty=args.pretty)

    if args.out:
        try:
            with open(args.out, "wb") as handle:
                handle.write(output)
        except OSError as exc:
            print(f"ctxmine: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.buffer.write(output)
        sys.stdout.buffer.flush()
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
