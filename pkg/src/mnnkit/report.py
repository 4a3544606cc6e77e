"""Aggregation and ranking: per-sample metric reports, cross-dataset
model ranking with deterministic tie-breaks, sampling-stability
statistics, and Markdown/CSV/JSON rendering.

Rendered tables round to 4 decimals with decimal half-up; JSON keeps
full precision. Ranking is ascending (lower is better) for compression
metrics; metrics where higher is better can be declared by name.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .core import ManifestFormatError

# Metrics where a larger value means a better model. Everything else
# (the nuclear-norm family, entropies, perplexity, loss) ranks ascending.
HIGHER_IS_BETTER = frozenset({"accuracy"})


@dataclass(frozen=True)
class MetricReport:
    """Per-sample values and their mean for one (model, dataset, metric)."""

    model_label: str
    dataset_label: str
    metric: str
    per_sample: tuple[tuple[str, float], ...]
    mean: float
    count: int

    def __post_init__(self) -> None:
        if self.count != len(self.per_sample):
            raise ValueError(f"count {self.count} does not match {len(self.per_sample)} per-sample values")
        if not self.per_sample:
            raise ValueError("a metric report needs at least one per-sample value")
        recomputed = math.fsum(v for _, v in self.per_sample) / len(self.per_sample)
        if abs(recomputed - self.mean) > 1e-12 * max(1.0, abs(self.mean)):
            raise ValueError(f"mean {self.mean!r} is not the average of the per-sample values ({recomputed!r})")


def make_report(model_label: str, dataset_label: str, metric: str, pairs) -> MetricReport:
    """Build a MetricReport from (id, value) pairs, computing the mean."""
    pairs = tuple((str(i), float(v)) for i, v in pairs)
    if not pairs:
        raise ValueError("a metric report needs at least one per-sample value")
    mean = math.fsum(v for _, v in pairs) / len(pairs)
    return MetricReport(model_label=model_label, dataset_label=dataset_label, metric=metric,
                        per_sample=pairs, mean=mean, count=len(pairs))


@dataclass(frozen=True)
class RankEntry:
    """One ranked model: per-dataset means, their average, and the rank."""

    model_label: str
    dataset_scores: dict[str, float]
    avg: float
    rank: int


def display_round(value: float, places: int = 4) -> str:
    """Round for table display using decimal half-up.

    Binary float formatting rounds 0.38545 down because its nearest
    double sits just under the half; published tables round such halves
    up. Quantizing the shortest decimal repr at 8 places first recovers
    the intended decimal value, then the final half-up rounding applies.
    """
    quantized = Decimal(repr(float(value))).quantize(Decimal("1e-8"), rounding=ROUND_HALF_UP)
    return str(quantized.quantize(Decimal(f"1e-{places}"), rounding=ROUND_HALF_UP))


def aggregate_scores(reports, *, higher_is_better: bool | None = None) -> list[RankEntry]:
    """Rank models by the unweighted mean of their per-dataset means.

    Every model must have exactly one report for every dataset present.
    Sorting is ascending by average unless the metric is declared
    higher-is-better; ties break lexicographically by model label.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to aggregate")
    metrics = {r.metric for r in reports}
    if len(metrics) > 1:
        raise ValueError(f"cannot rank across mixed metrics: {sorted(metrics)}")
    metric = next(iter(metrics))
    if higher_is_better is None:
        higher_is_better = metric in HIGHER_IS_BETTER

    datasets = sorted({r.dataset_label for r in reports})
    by_model: dict[str, dict[str, float]] = {}
    for r in reports:
        cell = by_model.setdefault(r.model_label, {})
        if r.dataset_label in cell:
            raise ValueError(f"duplicate report for model {r.model_label!r}, dataset {r.dataset_label!r}")
        cell[r.dataset_label] = r.mean
    for model, cell in by_model.items():
        missing = [d for d in datasets if d not in cell]
        if missing:
            raise ValueError(f"model {model!r} has no score for dataset {missing[0]!r}")

    scored = [
        (math.fsum(cell[d] for d in datasets) / len(datasets), model, cell)
        for model, cell in by_model.items()
    ]
    scored.sort(key=lambda item: (-item[0] if higher_is_better else item[0], item[1]))
    return [
        RankEntry(model_label=model, dataset_scores=dict(cell), avg=avg, rank=position)
        for position, (avg, model, cell) in enumerate(scored, start=1)
    ]


def stability_report(values) -> dict[str, float]:
    """Mean plus both standard deviation conventions for a value list.

    Emits the sample (n-1) and population (n) standard deviations side
    by side; sources differ on which convention they quote.
    """
    values = [float(v) for v in values]
    n = len(values)
    if n < 2:
        raise ValueError(f"stability needs at least 2 values, got {n}")
    mean = math.fsum(values) / n
    squared = math.fsum((v - mean) ** 2 for v in values)
    return {
        "mean": mean,
        "std_sample": math.sqrt(squared / (n - 1)),
        "std_population": math.sqrt(squared / n),
    }


_SIZE_PATTERN = re.compile(r"(\d+(?:\.\d+)?)\s*([MB])\b", re.IGNORECASE)


def size_cohort(model_label: str) -> str:
    """Decimal-magnitude cohort of a model label's parameter count.

    Parses the last size token (7B, 72B, 111M, ...) and buckets by order
    of magnitude in billions, so 7B-class and 70B-class models group
    separately. Labels without a size token fall into "unsized".
    """
    matches = _SIZE_PATTERN.findall(model_label)
    if not matches:
        return "unsized"
    number, unit = matches[-1]
    billions = float(number) / (1000.0 if unit.upper() == "M" else 1.0)
    if billions <= 0:
        return "unsized"
    exponent = math.floor(math.log10(billions))
    low, high = 10.0 ** exponent, 10.0 ** (exponent + 1)
    return f"{low:g}B to {high:g}B"


def aggregate_scores_by_cohort(reports, *, higher_is_better: bool | None = None) -> dict[str, list[RankEntry]]:
    """aggregate_scores applied separately inside each size cohort."""
    cohorts: dict[str, list] = {}
    for r in reports:
        cohorts.setdefault(size_cohort(r.model_label), []).append(r)
    return {
        cohort: aggregate_scores(cohort_reports, higher_is_better=higher_is_better)
        for cohort, cohort_reports in sorted(cohorts.items())
    }


def _rank_datasets(entries) -> list[str]:
    return sorted(entries[0].dataset_scores) if entries else []


def render_rank_markdown(entries, places: int = 4) -> str:
    """Markdown table: model, per-dataset scores, average, rank."""
    datasets = _rank_datasets(entries)
    header = ["Model", *datasets, "Avg Score", "Rank"]
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(" --- " for _ in header) + "|"]
    for e in entries:
        cells = [e.model_label,
                 *(display_round(e.dataset_scores[d], places) for d in datasets),
                 display_round(e.avg, places),
                 str(e.rank)]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render_rank_csv(entries, places: int = 4) -> str:
    """CSV table with the same columns as the Markdown rendering."""
    datasets = _rank_datasets(entries)
    lines = [",".join(["model", *datasets, "avg", "rank"])]
    for e in entries:
        lines.append(",".join([e.model_label,
                               *(display_round(e.dataset_scores[d], places) for d in datasets),
                               display_round(e.avg, places),
                               str(e.rank)]))
    return "\n".join(lines) + "\n"


def rank_entries_to_dict(entries) -> list[dict]:
    """Full-precision JSON-ready form of a ranking."""
    return [
        {"model": e.model_label, "dataset_scores": dict(sorted(e.dataset_scores.items())),
         "avg": e.avg, "rank": e.rank}
        for e in entries
    ]


def write_report_json(path, reports) -> None:
    """Write metric reports for one (model, dataset) pair as JSON.

    All reports must share the same model and dataset labels. Output is
    canonical: sorted keys, two-space indent, one trailing newline, so
    identical inputs produce byte-identical files.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to write")
    labels = {(r.model_label, r.dataset_label) for r in reports}
    if len(labels) > 1:
        raise ValueError(f"reports span multiple (model, dataset) pairs: {sorted(labels)}")
    model, dataset = next(iter(labels))
    payload = {
        "model": model,
        "dataset": dataset,
        "metrics": {
            r.metric: {
                "per_sample": [{"id": sid, "value": value} for sid, value in r.per_sample],
                "mean": r.mean,
                "count": r.count,
            }
            for r in reports
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_report_json(path) -> list[MetricReport]:
    """Load every metric report stored in one report JSON file."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestFormatError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return [
            MetricReport(
                model_label=payload["model"],
                dataset_label=payload["dataset"],
                metric=metric,
                per_sample=tuple((entry["id"], float(entry["value"])) for entry in body["per_sample"]),
                mean=float(body["mean"]),
                count=int(body["count"]),
            )
            for metric, body in payload["metrics"].items()
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestFormatError(f"{path}: malformed report file: {exc}") from exc
