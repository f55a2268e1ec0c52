import json

import pytest

from fixtures.scenarios import EXPECTED_ROW, metric_records
from specsynth.report import (
    FUZZ_OUTCOMES,
    MetricsTable,
    Tables,
    aggregate,
    emit,
    load_report,
    pct,
    render_text,
    report_json,
    round2,
)
from specsynth.speclang import SpecLevel


def test_four_record_metrics_row():
    t = aggregate(metric_records())
    assert t.metrics.row() == EXPECTED_ROW
    assert (t.metrics.total, t.metrics.test_valid, t.metrics.compile_error) == (4, 3, 1)


def test_one_third_rounds_half_up_at_two_decimals():
    assert pct(1, 3) == 33.33 and pct(2, 3) == 66.67
    assert round2(0.125) == 0.13 and round2(2.675) == 2.68


def test_empty_records_give_zeroed_tables():
    t = aggregate([])
    assert t.metrics.row() == (0.0, 0.0, 0.0, 0.0, 0.0)
    assert all(v == 0 for v in t.levels.counts.values())
    assert t.fuzz.total == 0 and t.cost.cost is None


def test_level_counts_and_histogram():
    t = aggregate(metric_records())
    assert t.levels.counts == {SpecLevel.PROP: 1, SpecLevel.FOL: 1, SpecLevel.PROP_SL: 0,
                               SpecLevel.FOSL: 1}
    assert sum(t.levels.counts.values()) == t.metrics.test_valid
    assert t.attempts.by_target == {SpecLevel.FOL: {2: 1}, SpecLevel.PROP: {1: 1},
                                    SpecLevel.PROP_SL: {3: 1}}


def test_all_valid_at_fol():
    fol = [r for r in metric_records() if r.accepted_level is SpecLevel.FOL] * 5
    counts = aggregate(fol).levels.counts
    assert counts[SpecLevel.FOL] == 5 and sum(counts.values()) == 5


def test_fuzz_outcomes_and_costs():
    t = aggregate(metric_records(), prices=(0.001, 0.01))
    assert t.fuzz.counts == {"PASSED": 3, "VIOLATED": 0, "TIMEOUT": 0}
    assert sum(t.fuzz.percentages().values()) == pytest.approx(100)
    assert (t.cost.tokens_in, t.cost.tokens_out) == (800, 80)
    assert t.cost.cost == pytest.approx(800 * 0.001 + 80 * 0.01)
    assert "cost" not in aggregate(metric_records()).cost.to_json()


def test_percentages_sum_to_one_hundred():
    records = metric_records()
    for n in range(1, 5):
        m = aggregate(records[:n]).metrics
        assert abs(m.test_valid_pct + m.test_invalid_pct + m.compile_error_pct - 100) <= 0.02


def test_aggregation_is_additive():
    records = metric_records()
    a, b, ab = aggregate(records[:2]), aggregate(records[2:]), aggregate(records)
    for field in ("total", "test_valid", "test_invalid", "compile_error", "trivial",
                  "atoms_total"):
        assert getattr(ab.metrics, field) == getattr(a.metrics, field) + getattr(b.metrics,
                                                                                 field)
    for k in FUZZ_OUTCOMES:
        assert ab.fuzz.counts[k] == a.fuzz.counts[k] + b.fuzz.counts[k]
    assert ab.cost.tokens_in == a.cost.tokens_in + b.cost.tokens_in


def test_emitted_percentages_match_emitted_counts():
    d = json.loads(emit(aggregate(metric_records())))
    m = d["metrics"]
    assert abs(100 * m["test_valid"] / m["total"] - m["test_valid_pct"]) <= 0.05
    assert abs(100 * m["trivial"] / m["test_valid"] - m["trivial_pct"]) <= 0.05


def test_json_round_trip_is_byte_identical():
    text = emit(aggregate(metric_records(), prices=(1, 2), timings=True), "json")
    again = emit(Tables.from_json(json.loads(text)), "json")
    assert again == text
    assert json.loads(text)["schema"] == "specsynth.tables/1"
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_text_rendering_has_the_results_header():
    text = emit(aggregate(metric_records()), "text")
    assert "Test Valid" in text and "75.00" in text and "33.33" in text
    assert "Tokens In" in text and "Cost" not in text
    assert render_text(aggregate(metric_records())) == text


def test_unknown_format():
    with pytest.raises(ValueError):
        emit(aggregate([]), "xml")


def test_timings_only_on_request():
    assert aggregate(metric_records()).timings is None
    t = aggregate(metric_records(), timings=True)
    assert {row["function"] for row in t.timings["per_function"]} == {"f1", "f2", "f3", "f4"}
    assert "Cumulative time" in emit(t, "text")


def test_report_document_round_trip():
    records = metric_records()
    text = report_json(records, {"generator": "test"})
    assert load_report(text) == records
    assert json.loads(text)["tables"]["metrics"]["test_valid"] == 3
    with pytest.raises(ValueError):
        load_report(json.dumps({"schema": "nope"}))


def test_trivial_share_uses_the_valid_denominator():
    m = MetricsTable(total=10, test_valid=4, trivial=1, atoms_total=6)
    assert m.trivial_pct == 25.0 and m.avg_atoms == 1.5
