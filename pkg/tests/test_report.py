"""Aggregation and ranking: metric reports, decimal half-up display
rounding, cross-dataset ranking with tie-breaks, size cohorts,
stability statistics, and rendering/serialization."""

import math

import numpy as np
import pytest

from mnnkit.core import ManifestFormatError
from mnnkit.report import (
    MetricReport,
    aggregate_scores,
    aggregate_scores_by_cohort,
    display_round,
    load_report_json,
    make_report,
    rank_entries_to_dict,
    render_rank_csv,
    render_rank_markdown,
    size_cohort,
    stability_report,
    write_report_json,
)

# Published per-dataset scores for the 7B-class and 70B-class cohorts:
# (model, instruction-following score, hard-prompt score).
SEVEN_B = [
    ("DeepSeek-7B", 0.3352, 0.4357),
    ("Gemma-7B", 0.3759, 0.3998),
    ("Vicuna-7B", 0.4623, 0.4824),
    ("LLaMA 2-7B", 0.4648, 0.5038),
    ("QWEN 1.5-7B", 0.4866, 0.5165),
    ("Mistral-7B", 0.4980, 0.5126),
    ("QWEN 2-7B", 0.5989, 0.5751),
]
SEVEN_B_AVG = ["0.3855", "0.3879", "0.4724", "0.4843", "0.5016", "0.5053", "0.5870"]
SEVENTY_B = [
    ("QWEN 1.5-72B", 0.5291, 0.5065),
    ("QWEN 2-72B", 0.5261, 0.4689),
    ("Llama 3-70B", 0.4935, 0.4967),
    ("Llama 2-70B", 0.3862, 0.4086),
]


def reports_from_scores(scores, metric="mnn"):
    reports = []
    for model, d1, d2 in scores:
        reports.append(make_report(model, "alpaca", metric, [("s1", d1)]))
        reports.append(make_report(model, "arena", metric, [("s1", d2)]))
    return reports


def test_make_report_computes_mean():
    report = make_report("m", "d", "mnn", [("a", 0.25), ("b", 0.75)])
    assert report.mean == 0.5
    assert report.count == 2
    assert report.per_sample == (("a", 0.25), ("b", 0.75))


def test_metric_report_validates_consistency():
    with pytest.raises(ValueError, match="count 3 does not match 2"):
        MetricReport("m", "d", "mnn", (("a", 0.1), ("b", 0.2)), 0.15, 3)
    with pytest.raises(ValueError, match="is not the average"):
        MetricReport("m", "d", "mnn", (("a", 0.1), ("b", 0.2)), 0.5, 2)
    with pytest.raises(ValueError, match="at least one per-sample value"):
        make_report("m", "d", "mnn", [])


def test_display_round_half_up_ties():
    # Averaging two 4-decimal scores lands on a 5th-decimal half whose
    # nearest double can sit just below it; naive %.4f then rounds down
    # while the published tables round half up.
    avg = math.fsum([0.3352, 0.4357]) / 2
    assert f"{avg:.4f}" == "0.3854"
    assert display_round(avg) == "0.3855"
    assert display_round(math.fsum([0.4623, 0.4824]) / 2) == "0.4724"
    assert display_round(math.fsum([0.4866, 0.5165]) / 2) == "0.5016"
    assert display_round(0.38545) == "0.3855"
    assert display_round(0.38785) == "0.3879"
    assert display_round(0.4843) == "0.4843"
    assert display_round(1.0) == "1.0000"
    assert display_round(0.123456, places=2) == "0.12"


def test_aggregate_reproduces_published_seven_b_cohort():
    entries = aggregate_scores(reports_from_scores(SEVEN_B))
    assert [e.model_label for e in entries] == [model for model, _, _ in SEVEN_B]
    assert [e.rank for e in entries] == list(range(1, 8))
    assert [display_round(e.avg) for e in entries] == SEVEN_B_AVG
    assert entries[0].dataset_scores == {"alpaca": 0.3352, "arena": 0.4357}


def test_aggregate_reproduces_published_seventy_b_cohort():
    entries = aggregate_scores(reports_from_scores(SEVENTY_B))
    assert [e.model_label for e in entries] == [
        "Llama 2-70B", "Llama 3-70B", "QWEN 2-72B", "QWEN 1.5-72B",
    ]
    assert [display_round(e.avg) for e in entries] == [
        "0.3974", "0.4951", "0.4975", "0.5178",
    ]


def test_aggregate_order_is_input_order_independent():
    reports = reports_from_scores(SEVEN_B)
    shuffled = [reports[i] for i in np.random.default_rng(0).permutation(len(reports))]
    assert aggregate_scores(reports) == aggregate_scores(shuffled)


def test_aggregate_ranks_ascending_with_lexicographic_ties():
    reports = [
        make_report("charlie", "d", "mnn", [("s", 0.3)]),
        make_report("alpha", "d", "mnn", [("s", 0.3)]),
        make_report("bravo", "d", "mnn", [("s", 0.2)]),
    ]
    entries = aggregate_scores(reports)
    assert [(e.model_label, e.rank) for e in entries] == [
        ("bravo", 1), ("alpha", 2), ("charlie", 3),
    ]


def test_aggregate_higher_is_better():
    reports = [
        make_report("a", "d", "accuracy", [("s", 0.7)]),
        make_report("b", "d", "accuracy", [("s", 0.9)]),
    ]
    entries = aggregate_scores(reports)
    assert [e.model_label for e in entries] == ["b", "a"]
    flipped = aggregate_scores(reports, higher_is_better=False)
    assert [e.model_label for e in flipped] == ["a", "b"]


def test_aggregate_rejects_inconsistent_inputs():
    with pytest.raises(ValueError, match="no reports"):
        aggregate_scores([])
    mixed = [
        make_report("a", "d", "mnn", [("s", 0.1)]),
        make_report("b", "d", "perplexity", [("s", 2.0)]),
    ]
    with pytest.raises(ValueError, match="mixed metrics"):
        aggregate_scores(mixed)
    duplicated = [
        make_report("a", "d", "mnn", [("s", 0.1)]),
        make_report("a", "d", "mnn", [("s", 0.2)]),
    ]
    with pytest.raises(ValueError, match="duplicate report"):
        aggregate_scores(duplicated)
    lopsided = [
        make_report("a", "d1", "mnn", [("s", 0.1)]),
        make_report("a", "d2", "mnn", [("s", 0.2)]),
        make_report("b", "d1", "mnn", [("s", 0.3)]),
    ]
    with pytest.raises(ValueError, match="'b' has no score for dataset 'd2'"):
        aggregate_scores(lopsided)


def test_stability_report_published_run_values():
    # Five repeated-sampling scores of one small model; the frozen
    # expectations come from a two-pass math.fsum recomputation.
    values = [0.5684, 0.5670, 0.5676, 0.5699, 0.5693]
    stats = stability_report(values)
    assert abs(stats["mean"] - 0.5684400000000001) <= 1e-15
    assert abs(stats["std_sample"] - 0.0011886967653695472) <= 1e-15
    assert abs(stats["std_population"] - 0.00106320270880017) <= 1e-15


def test_stability_report_constant_values():
    stats = stability_report([0.25, 0.25, 0.25])
    assert stats["mean"] == 0.25
    assert stats["std_sample"] == 0.0
    assert stats["std_population"] == 0.0


def test_stability_report_matches_two_pass_oracle():
    rng = np.random.default_rng(47)
    values = rng.random(20).tolist()
    stats = stability_report(values)
    mean = math.fsum(values) / 20
    squared = math.fsum((v - mean) ** 2 for v in values)
    assert abs(stats["mean"] - mean) <= 1e-12
    assert abs(stats["std_sample"] - math.sqrt(squared / 19)) <= 1e-12
    assert abs(stats["std_population"] - math.sqrt(squared / 20)) <= 1e-12
    assert stats["std_population"] <= stats["std_sample"]


def test_stability_report_needs_two_values():
    with pytest.raises(ValueError, match="at least 2 values"):
        stability_report([0.5])


def test_size_cohort_buckets_by_magnitude():
    assert size_cohort("DeepSeek-7B") == "1B to 10B"
    assert size_cohort("QWEN 1.5-72B") == "10B to 100B"
    assert size_cohort("Llama 3-70B") == "10B to 100B"
    assert size_cohort("Cerebras-GPT-111M") == "0.1B to 1B"
    assert size_cohort("Cerebras-GPT-1.3B") == "1B to 10B"
    assert size_cohort("OPT-13B") == "10B to 100B"
    assert size_cohort("some-model") == "unsized"
    assert size_cohort("GPT-2") == "unsized"


def test_aggregate_by_cohort_separates_model_classes():
    grouped = aggregate_scores_by_cohort(reports_from_scores(SEVEN_B + SEVENTY_B))
    assert set(grouped) == {"1B to 10B", "10B to 100B"}
    assert len(grouped["1B to 10B"]) == 7
    assert len(grouped["10B to 100B"]) == 4
    assert [e.rank for e in grouped["10B to 100B"]] == [1, 2, 3, 4]
    assert grouped["1B to 10B"][0].model_label == "DeepSeek-7B"
    assert grouped["10B to 100B"][0].model_label == "Llama 2-70B"


def test_render_rank_markdown_golden():
    reports = [
        make_report("A", "ds1", "mnn", [("s", 0.2)]),
        make_report("A", "ds2", "mnn", [("s", 0.4)]),
        make_report("B", "ds1", "mnn", [("s", 0.1)]),
        make_report("B", "ds2", "mnn", [("s", 0.3)]),
    ]
    entries = aggregate_scores(reports)
    assert render_rank_markdown(entries) == (
        "| Model | ds1 | ds2 | Avg Score | Rank |\n"
        "|" + " --- |" * 5 + "\n"
        "| B | 0.1000 | 0.3000 | 0.2000 | 1 |\n"
        "| A | 0.2000 | 0.4000 | 0.3000 | 2 |\n"
    )
    assert render_rank_csv(entries) == (
        "model,ds1,ds2,avg,rank\n"
        "B,0.1000,0.3000,0.2000,1\n"
        "A,0.2000,0.4000,0.3000,2\n"
    )
    payload = rank_entries_to_dict(entries)
    assert payload[0] == {
        "model": "B", "dataset_scores": {"ds1": 0.1, "ds2": 0.3},
        "avg": 0.2, "rank": 1,
    }


def test_report_json_round_trip_and_canonical_bytes(tmp_path):
    reports = [
        make_report("m", "d", "mnn", [("s1", 0.5), ("s2", 0.25)]),
        make_report("m", "d", "perplexity", [("s1", 2.0), ("s2", 4.0)]),
    ]
    path = tmp_path / "report.json"
    write_report_json(path, reports)
    loaded = load_report_json(path)
    assert loaded == reports

    again = tmp_path / "again.json"
    write_report_json(again, reports)
    assert path.read_bytes() == again.read_bytes()


def test_report_json_golden_layout(tmp_path):
    path = tmp_path / "report.json"
    write_report_json(path, [make_report("m", "d", "mnn", [("s1", 0.5), ("s2", 0.25)])])
    assert path.read_text() == (
        "{\n"
        '  "dataset": "d",\n'
        '  "metrics": {\n'
        '    "mnn": {\n'
        '      "count": 2,\n'
        '      "mean": 0.375,\n'
        '      "per_sample": [\n'
        "        {\n"
        '          "id": "s1",\n'
        '          "value": 0.5\n'
        "        },\n"
        "        {\n"
        '          "id": "s2",\n'
        '          "value": 0.25\n'
        "        }\n"
        "      ]\n"
        "    }\n"
        "  },\n"
        '  "model": "m"\n'
        "}\n"
    )


def test_write_report_json_rejects_mixed_labels(tmp_path):
    reports = [
        make_report("m1", "d", "mnn", [("s", 0.5)]),
        make_report("m2", "d", "mnn", [("s", 0.5)]),
    ]
    with pytest.raises(ValueError, match="multiple \\(model, dataset\\) pairs"):
        write_report_json(tmp_path / "r.json", reports)
    with pytest.raises(ValueError, match="no reports"):
        write_report_json(tmp_path / "r.json", [])


def test_load_report_json_rejects_malformed_files(tmp_path):
    path = tmp_path / "r.json"
    path.write_text("{broken")
    with pytest.raises(ManifestFormatError, match="invalid JSON"):
        load_report_json(path)
    path.write_text('{"model": "m"}')
    with pytest.raises(ManifestFormatError, match="malformed report file"):
        load_report_json(path)
