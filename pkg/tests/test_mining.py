import itertools
import json

import pytest

from specsynth.mining import (
    Features,
    IngestError,
    dynamic_heap_feature,
    ingest_corpus,
    ingest_text,
    manifest,
    manifest_json,
    select_language,
    static_features,
)
from specsynth.minilang import parse_function
from specsynth.speclang import SpecLevel, level_leq

from conftest import FIXTURES, corpus


def by_name(c):
    return {a.name: a for a in c}


def test_swap_is_heap_manipulating(swap_corpus):
    swap = by_name(swap_corpus)["swap"]
    assert swap.features.heap_dynamic and swap.features.heap_syntax
    assert swap.target_level is SpecLevel.PROP_SL


def test_pure_function_has_no_heap_features():
    a = by_name(corpus("selector"))["max2"]
    assert not a.features.heap_syntax and not a.features.heap_dynamic
    assert a.features.has_conditional and not a.features.has_loop


def test_empty_file_gives_empty_corpus(tmp_path):
    f = tmp_path / "empty.mini"
    f.write_text("")
    assert list(ingest_corpus(f)) == []


def test_static_features_of_a_lookup_loop():
    fn, _ = parse_function("fn find(a: int[], v: int) -> bool { var i: int = 0;"
                           " while (i < len(a)) { if (a[i] == v) { return true; }"
                           " i = i + 1; } return false; }")
    f = static_features(fn)
    assert f.has_loop and f.has_conditional and f.has_induction_var and not f.heap_syntax


def test_static_features_of_swap():
    fn, _ = parse_function("fn swap(x: ptr, y: ptr) -> void { var t: int = *x;"
                           " *x = *y; *y = t; }")
    assert static_features(fn) == Features(heap_syntax=True)


def test_loop_without_additive_update_is_not_an_induction_loop():
    fn, _ = parse_function("fn halve(n: int) -> int { while (n > 1) { n = n / 2; }"
                           " return n; }")
    f = static_features(fn)
    assert f.has_loop and not f.has_induction_var


def test_dynamic_feature_of_swap_and_pure_max(swap_corpus):
    swap = by_name(swap_corpus)["swap"]
    assert dynamic_heap_feature(swap.fn, swap.tests)
    m = by_name(corpus("selector"))["max2"]
    assert not dynamic_heap_feature(m.fn, m.tests)


def test_alloc_behind_untaken_branch_splits_static_and_dynamic():
    a = by_name(corpus("selector"))["scratch"]
    assert a.features.heap_syntax and not a.features.heap_dynamic
    assert a.target_level is SpecLevel.PROP_SL


def test_faulting_tests_still_contribute_their_trace():
    text = "fn bad(p: ptr) -> int { var v: int = *p; return 1 / 0; }\n" \
           "#[test] t(_) with heap { p: [1] }\n"
    a = ingest_text(text)[0]
    assert a.features.heap_dynamic


SELECTOR_TABLE = {
    (False, False): SpecLevel.PROP,
    (True, False): SpecLevel.FOL,
    (False, True): SpecLevel.PROP_SL,
    (True, True): SpecLevel.FOSL,
}


def test_selector_on_constructed_corpus_entries():
    got = {a.name: a.target_level for a in corpus("selector")}
    assert got == {"max2": SpecLevel.PROP, "sum": SpecLevel.FOL, "bump": SpecLevel.PROP_SL,
                   "fill": SpecLevel.FOSL, "scratch": SpecLevel.PROP_SL}


@pytest.mark.parametrize("loop,syntax,dynamic", list(itertools.product([False, True], repeat=3)))
def test_selector_reads_loop_and_heap_disjunction(loop, syntax, dynamic):
    f = Features(has_loop=loop, heap_syntax=syntax, heap_dynamic=dynamic)
    assert select_language(f) is SELECTOR_TABLE[(loop, syntax or dynamic)]


def test_selector_is_monotone():
    for (l1, h1), (l2, h2) in itertools.product(SELECTOR_TABLE, repeat=2):
        if l1 <= l2 and h1 <= h2:
            assert level_leq(SELECTOR_TABLE[(l1, h1)], SELECTOR_TABLE[(l2, h2)])
    assert len(set(SELECTOR_TABLE.values())) == 4


def test_untested_function_is_excluded_with_a_note():
    c = corpus("selector")
    assert "untested" not in by_name(c)
    assert c.excluded == ["untested"]
    assert "untested" in c.notes[0]


def test_ingest_errors_are_aggregated():
    text = "fn a( {\n\nfn b(x: int) -> int { return y; }\n#[test] t(1)\n"
    with pytest.raises(IngestError) as e:
        ingest_text(text, "bad.mini")
    assert len(e.value.failures) == 2
    assert "bad.mini:1" in str(e.value)


def test_duplicate_function_names_are_errors():
    entry = "fn a(x: int) -> int { return x; }\n#[test] t(1)\n"
    with pytest.raises(IngestError):
        ingest_text(entry + "\n" + entry)


def test_directory_ingestion_orders_by_file_then_entry(tmp_path):
    (tmp_path / "b.mini").write_text("fn second(x: int) -> int { return x; }\n#[test] t(1)\n")
    (tmp_path / "a.mini").write_text((FIXTURES / "swap.mini").read_text())
    assert [a.name for a in ingest_corpus(tmp_path)] == ["swap", "noswap", "second"]


def test_ingest_is_deterministic_and_manifest_is_stable():
    a, b = corpus("micro"), corpus("micro")
    assert list(a) == list(b)
    assert manifest_json(a) == manifest_json(b)
    m = json.loads(manifest_json(a))
    assert m["schema"] == manifest(a)["schema"]
    row = m["functions"][0]
    assert set(row) >= {"name", "features", "target_level", "tests"}
    assert all(a.target_level is select_language(a.features) for a in a)
