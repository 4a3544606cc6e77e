"""Command-line entry point: compute (one file, one metric), batch
(manifest, many metrics), bench (timing), rank (report files), and
stability (value spread).

Exit codes: 0 success, 1 usage error, 2 data or convergence error.
Batch output is canonical JSON written in manifest order, so identical
inputs produce byte-identical files at any worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .bench import append_bench_csv, run_scaling_bench, summarize, write_ratio_json
from .core import ConvergenceError, DegenerateSampleError, ManifestFormatError, MatrixFormatError, MnnkitError
from .matrixio import load_logprobs, load_manifest, load_matrix
from .mnn import MnnConfig, approx_nuclear_norm, matrix_nuclear_norm
from .probmetrics import cross_entropy, frobenius_norm, perplexity, shannon_entropy
from .report import (
    aggregate_scores,
    aggregate_scores_by_cohort,
    load_report_json,
    make_report,
    rank_entries_to_dict,
    render_rank_csv,
    render_rank_markdown,
    stability_report,
    write_report_json,
)
from .spectral import exact_nuclear_norm, numerical_rank, sample_matrix_entropy

MATRIX_METRICS = ("mnn", "nuclear", "nuclear-approx", "matrix-entropy", "frobenius", "shannon-entropy", "rank")
LOGPROB_METRICS = ("cross-entropy", "perplexity")
ALL_METRICS = MATRIX_METRICS + LOGPROB_METRICS


class _UsageError(Exception):
    """Bad flags or flag combinations; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse API
        raise _UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _size_list(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}") from exc
    if not sizes:
        raise argparse.ArgumentTypeError("sizes list is empty")
    return sizes


def _value_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"values must be comma-separated numbers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("value list is empty")
    return values


def _default_jobs() -> int:
    raw = os.environ.get("MNN_JOBS")
    if raw is None:
        return 1
    try:
        jobs = int(raw)
    except ValueError:
        raise _UsageError(f"MNN_JOBS must be an integer >= 1, got {raw!r}") from None
    if jobs < 1:
        raise _UsageError(f"MNN_JOBS must be an integer >= 1, got {raw!r}")
    return jobs


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mnnkit", description="Matrix nuclear-norm metrics toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    compute = sub.add_parser("compute", help="score one matrix or log-prob file with one metric")
    compute.add_argument("--metric", required=True, choices=ALL_METRICS)
    compute.add_argument("--input", required=True, help="NPY or CSV file")
    compute.add_argument("--top-d", type=_positive_int, default=None,
                         help="leading values kept by mnn/nuclear-approx (default min(rows, cols))")
    compute.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    compute.set_defaults(handler=_cmd_compute)

    batch = sub.add_parser("batch", help="score every sample of a manifest with one or more metrics")
    batch.add_argument("--manifest", required=True)
    batch.add_argument("--metric", action="append", required=True, choices=ALL_METRICS,
                       help="repeatable; each metric adds a report section")
    batch.add_argument("--out", required=True, help="report JSON output path")
    batch.add_argument("--top-d", type=_positive_int, default=None)
    batch.add_argument("--length-from", choices=("rows", "manifest"), default="rows",
                       help="mnn length normalizer: matrix row count or manifest length field")
    batch.add_argument("--jobs", type=_positive_int, default=None,
                       help="parallel sample workers (default MNN_JOBS or 1)")
    batch.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    batch.set_defaults(handler=_cmd_batch)

    bench = sub.add_parser("bench", help="time the mnn and matrix-entropy pipelines over square sizes")
    bench.add_argument("--sizes", type=_size_list, default=[256, 512, 1024, 2048],
                       help="comma-separated ascending sizes")
    bench.add_argument("--repeats", type=_positive_int, default=5)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--csv", default=None, help="append per-run records to this CSV")
    bench.add_argument("--json", default=None, help="write per-size time ratios to this JSON")
    bench.set_defaults(handler=_cmd_bench)

    rank = sub.add_parser("rank", help="rank models from batch report files")
    rank.add_argument("reports", nargs="+", help="report JSON files from `batch`")
    rank.add_argument("--metric", default="mnn", help="metric to rank by (default mnn)")
    rank.add_argument("--group-by", choices=("size-cohort",), default=None,
                      help="rank inside parameter-size cohorts instead of one table")
    rank.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    rank.set_defaults(handler=_cmd_rank)

    stability = sub.add_parser("stability", help="mean and spread of a value list or of report means")
    stability.add_argument("reports", nargs="*", help="report JSON files; their metric means are the values")
    stability.add_argument("--values", type=_value_list, default=None,
                           help="comma-separated values, instead of report files")
    stability.add_argument("--metric", default="mnn", help="metric mean taken from each report (default mnn)")
    stability.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    stability.set_defaults(handler=_cmd_stability)

    return parser


def _mnn_config(top_d, length_override=None) -> MnnConfig:
    return MnnConfig(top_d=top_d, length_override=length_override)


def _matrix_metric_value(metric: str, X, config: MnnConfig):
    if metric == "mnn":
        return matrix_nuclear_norm(X, config)
    if metric == "nuclear":
        return exact_nuclear_norm(X)
    if metric == "nuclear-approx":
        return approx_nuclear_norm(X, config)
    if metric == "matrix-entropy":
        return sample_matrix_entropy(X)
    if metric == "frobenius":
        return frobenius_norm(X)
    if metric == "shannon-entropy":
        return shannon_entropy(X)
    if metric == "rank":
        return numerical_rank(X)
    raise ValueError(f"unknown matrix metric {metric!r}")


def _render_single(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload) + "\n"
    keys = list(payload)
    if fmt == "csv":
        return ",".join(keys) + "\n" + ",".join(str(payload[k]) for k in keys) + "\n"
    head = "| " + " | ".join(keys) + " |"
    rule = "|" + "|".join(" --- " for _ in keys) + "|"
    row = "| " + " | ".join(str(payload[k]) for k in keys) + " |"
    return "\n".join([head, rule, row]) + "\n"


def _cmd_compute(args) -> int:
    path = Path(args.input)
    if args.metric in LOGPROB_METRICS:
        values = load_logprobs(path)
        value = cross_entropy(values) if args.metric == "cross-entropy" else perplexity(values)
        payload = {"metric": args.metric, "value": value, "input": args.input, "tokens": int(values.size)}
    else:
        X = load_matrix(path)
        value = _matrix_metric_value(args.metric, X, _mnn_config(args.top_d))
        payload = {"metric": args.metric, "value": value, "input": args.input,
                   "rows": int(X.shape[0]), "cols": int(X.shape[1])}
    sys.stdout.write(_render_single(payload, args.format))
    return 0


def _score_sample(sample, metrics, top_d, length_from):
    """All requested metric values for one manifest sample, id first."""
    values: dict[str, float] = {}
    matrix = None
    for metric in metrics:
        if metric in LOGPROB_METRICS:
            if sample.logprobs_path is None:
                raise ManifestFormatError(f"sample {sample.id!r} has no logprobs_path, required by {metric}")
            lp = load_logprobs(sample.logprobs_path)
            values[metric] = cross_entropy(lp) if metric == "cross-entropy" else perplexity(lp)
            continue
        if matrix is None:
            matrix = load_matrix(sample.matrix_path)
        length_override = sample.length if (metric == "mnn" and length_from == "manifest") else None
        values[metric] = _matrix_metric_value(metric, matrix, _mnn_config(top_d, length_override))
    return sample.id, values


def _cmd_batch(args) -> int:
    manifest = load_manifest(args.manifest)
    metrics = list(dict.fromkeys(args.metric))
    jobs = args.jobs if args.jobs is not None else _default_jobs()

    if jobs == 1:
        results = [_score_sample(s, metrics, args.top_d, args.length_from) for s in manifest.samples]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(
                lambda s: _score_sample(s, metrics, args.top_d, args.length_from),
                manifest.samples))

    reports = [
        make_report(manifest.model_label, manifest.dataset_label, metric,
                    [(sid, values[metric]) for sid, values in results])
        for metric in metrics
    ]
    write_report_json(args.out, reports)
    payload = {
        "model": manifest.model_label,
        "dataset": manifest.dataset_label,
        "samples": len(manifest.samples),
        "out": args.out,
        **{f"mean_{r.metric}": r.mean for r in reports},
    }
    sys.stdout.write(_render_single(payload, args.format))
    return 0


def _cmd_bench(args) -> int:
    table = run_scaling_bench(args.sizes, args.repeats, args.seed)
    if args.csv:
        append_bench_csv(args.csv, table.records)
    if args.json:
        write_ratio_json(args.json, table)
    sys.stdout.write(json.dumps(summarize(table), indent=2) + "\n")
    return 0


def _load_rank_reports(paths, metric):
    reports = []
    for path in paths:
        matched = [r for r in load_report_json(path) if r.metric == metric]
        if not matched:
            raise ManifestFormatError(f"{path}: no {metric!r} report in file")
        reports.extend(matched)
    return reports


def _cmd_rank(args) -> int:
    reports = _load_rank_reports(args.reports, args.metric)
    if args.group_by == "size-cohort":
        grouped = aggregate_scores_by_cohort(reports)
        if args.format == "json":
            sys.stdout.write(json.dumps(
                {cohort: rank_entries_to_dict(entries) for cohort, entries in grouped.items()},
                indent=2, sort_keys=True) + "\n")
        elif args.format == "csv":
            lines = []
            for cohort, entries in grouped.items():
                body = render_rank_csv(entries).splitlines()
                if not lines:
                    lines.append("cohort," + body[0])
                lines.extend(f"{cohort},{row}" for row in body[1:])
            sys.stdout.write("\n".join(lines) + "\n")
        else:
            for cohort, entries in grouped.items():
                sys.stdout.write(f"## {cohort}\n\n" + render_rank_markdown(entries) + "\n")
    else:
        entries = aggregate_scores(reports)
        if args.format == "json":
            sys.stdout.write(json.dumps(rank_entries_to_dict(entries), indent=2, sort_keys=True) + "\n")
        elif args.format == "csv":
            sys.stdout.write(render_rank_csv(entries))
        else:
            sys.stdout.write(render_rank_markdown(entries))
    return 0


def _cmd_stability(args) -> int:
    if args.values is not None and args.reports:
        raise _UsageError("stability: pass either --values or report files, not both")
    if args.values is not None:
        values = args.values
    elif args.reports:
        values = [r.mean for path in args.reports for r in load_report_json(path) if r.metric == args.metric]
        if len(values) < 2:
            raise ManifestFormatError(f"found {len(values)} {args.metric!r} means across the report files, need >= 2")
    else:
        raise _UsageError("stability: pass --values or at least one report file")
    stats = stability_report(values)
    payload = {"count": len(values), **{k: stats[k] for k in ("mean", "std_sample", "std_population")}}
    sys.stdout.write(_render_single(payload, args.format))
    return 0


def dispatch(argv) -> int:
    """Parse argv and run the selected subcommand, returning an exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse exits directly for --help (code 0)
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (MnnkitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(dispatch(sys.argv[1:]))
