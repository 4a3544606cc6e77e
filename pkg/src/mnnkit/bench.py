"""Scaling benchmark: times the matrix nuclear-norm pipeline against the
eigendecomposition-backed matrix-entropy pipeline over growing square
matrices, reports medians and per-size ratios, and fits log-log slopes.

The timed region covers normalization plus the metric itself and runs on
a single worker; matrix generation and file I/O stay outside the clock.
The entropy pipeline defaults to the LAPACK eigensolver here: both exact
solvers are O(n^3), but only the LAPACK path finishes benchmark-scale
problems in desk-scale time, and mixing solvers across sizes would
corrupt the fitted slopes.
"""

from __future__ import annotations

import gc
import json
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ConvergenceError
from .mnn import matrix_nuclear_norm
from .spectral import sample_matrix_entropy

BENCH_METRICS = ("mnn", "matrix_entropy")


@dataclass(frozen=True)
class BenchRecord:
    """One timed run of one metric on one n x n matrix."""

    metric: str
    size: int
    repeat: int
    seconds: float
    converged: bool = True


@dataclass(frozen=True)
class BenchTable:
    """All records of a bench plus medians and entropy/mnn time ratios.

    Medians only aggregate converged repeats; a size appears in ratios
    only when both metrics produced a median there.
    """

    records: tuple[BenchRecord, ...]
    medians: dict[tuple[str, int], float]
    ratios: dict[int, float]


def bench_matrix(seed: int, size: int) -> np.ndarray:
    """The seeded standard-normal matrix timed at this size.

    The stream is derived from (seed, size), so the same seed yields the
    same matrix bitwise regardless of which other sizes are benchmarked.
    """
    return np.random.default_rng([seed, size]).standard_normal((size, size))


def run_scaling_bench(
    sizes,
    repeats: int,
    seed: int,
    *,
    entropy_solver: str = "lapack",
) -> BenchTable:
    """Time both metric pipelines over the given square sizes.

    Each (metric, size) cell gets one untimed warmup and `repeats` timed
    runs on a monotonic clock; repeats cycle round-robin over the cells
    so background load spikes cannot dominate any one cell's median.
    Eigensolver non-convergence is recorded on the run's record and that
    run is excluded from the medians.
    """
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise ValueError("sizes must be non-empty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"sizes must be strictly ascending, got {sizes}")
    if repeats < 3:
        raise ValueError(f"repeats must be >= 3, got {repeats}")

    pipelines = {
        "mnn": lambda X: matrix_nuclear_norm(X),
        "matrix_entropy": lambda X: sample_matrix_entropy(X, solver=entropy_solver),
    }
    # Burn-in at the largest size before any timing: in a fresh process
    # the first measured cells otherwise pay for clock ramp-up and first
    # touches, which skews the small-size medians.
    burn_in = bench_matrix(seed, sizes[-1])
    for metric in BENCH_METRICS:
        try:
            pipelines[metric](burn_in)
        except ConvergenceError:
            pass
    del burn_in

    matrices = {size: bench_matrix(seed, size) for size in sizes}
    for size in sizes:
        for metric in BENCH_METRICS:
            try:
                pipelines[metric](matrices[size])
            except ConvergenceError:
                pass

    # Repeats are spread round-robin over every (metric, size) cell, so a
    # transient load spike lands in at most one repeat per cell instead of
    # poisoning a whole cell's median. GC stays paused in the timed phase
    # (as timeit does).
    cells: dict[tuple[str, int], list[BenchRecord]] = {
        (metric, size): [] for size in sizes for metric in BENCH_METRICS
    }
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for repeat in range(repeats):
            for size in sizes:
                for metric in BENCH_METRICS:
                    start = time.perf_counter()
                    converged = True
                    try:
                        pipelines[metric](matrices[size])
                    except ConvergenceError:
                        converged = False
                    elapsed = time.perf_counter() - start
                    cells[(metric, size)].append(BenchRecord(metric=metric, size=size, repeat=repeat,
                                                             seconds=elapsed, converged=converged))
    finally:
        if gc_was_enabled:
            gc.enable()
    records: list[BenchRecord] = []
    for size in sizes:
        for metric in BENCH_METRICS:
            records.extend(cells[(metric, size)])

    medians: dict[tuple[str, int], float] = {}
    for size in sizes:
        for metric in BENCH_METRICS:
            finished = [r.seconds for r in records
                        if r.metric == metric and r.size == size and r.converged]
            if finished:
                medians[(metric, size)] = statistics.median(finished)
    ratios = {
        size: medians[("matrix_entropy", size)] / medians[("mnn", size)]
        for size in sizes
        if ("matrix_entropy", size) in medians and ("mnn", size) in medians
    }
    return BenchTable(records=tuple(records), medians=medians, ratios=ratios)


def fit_loglog_slope(table: BenchTable, metric: str) -> float:
    """Least-squares slope of ln(median seconds) against ln(size)."""
    if metric not in BENCH_METRICS:
        raise ValueError(f"unknown metric {metric!r}, expected one of {BENCH_METRICS}")
    points = sorted((size, seconds) for (m, size), seconds in table.medians.items() if m == metric)
    if len(points) < 3:
        raise ValueError(f"slope fit needs medians at >= 3 distinct sizes, have {len(points)}")
    log_n = np.log([float(size) for size, _ in points])
    log_t = np.log([seconds for _, seconds in points])
    slope, _ = np.polyfit(log_n, log_t, 1)
    return float(slope)


def append_bench_csv(path, records) -> None:
    """Append records to a CSV with header metric,size,repeat,seconds.

    The header is written once when the file is new or empty; re-running
    with the same configuration appends rows of identical structure.
    """
    path = Path(path)
    needs_header = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8", newline="") as fh:
        if needs_header:
            fh.write("metric,size,repeat,seconds\n")
        for record in records:
            fh.write(f"{record.metric},{record.size},{record.repeat},{record.seconds!r}\n")


def write_ratio_json(path, table: BenchTable) -> None:
    """Write the per-size entropy/mnn time ratios as JSON keyed by size."""
    payload = {str(size): table.ratios[size] for size in sorted(table.ratios)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def summarize(table: BenchTable) -> dict:
    """Plain-dict summary of medians, ratios, and slopes where fittable."""
    summary: dict = {
        "medians": {
            metric: {str(size): table.medians[(metric, size)]
                     for (m, size) in sorted(table.medians) if m == metric}
            for metric in BENCH_METRICS
        },
        "ratios": {str(size): table.ratios[size] for size in sorted(table.ratios)},
    }
    slopes = {}
    for metric in BENCH_METRICS:
        try:
            slopes[metric] = fit_loglog_slope(table, metric)
        except ValueError:
            continue
    if slopes:
        summary["slopes"] = slopes
    return summary
