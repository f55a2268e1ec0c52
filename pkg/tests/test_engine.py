import json

import pytest

from fixtures.scenarios import MAX_OF_SCRIPT, convergence, convergence_ok
from specsynth.engine import (
    AttemptRecord,
    Classification,
    EngineConfig,
    RefinementRecord,
    Stage,
    classify,
    function_seed,
    refine,
    run_corpus,
)
from specsynth.fuzz import FuzzConfig
from specsynth.generate import Enumerative, GeneratorError, ScriptedMock
from specsynth.mining import ingest_text
from specsynth.speclang import SpecLevel, level_leq

from conftest import artifact, corpus

CFG = EngineConfig(max_attempts=20, fuzz=FuzzConfig(max_execs=5000))


@pytest.fixture(scope="module")
def scenario():
    return convergence()


def test_scripted_convergence_on_max_of(scenario):
    r = scenario["converged"]
    assert r.stages == [Stage.LEVEL_SHORTFALL, Stage.FUZZ_VIOLATED, Stage.ACCEPTED]
    assert r.classification is Classification.TEST_VALID
    assert r.accepted == MAX_OF_SCRIPT[2]
    assert r.accepted_level is SpecLevel.FOL and r.atoms == 3 and not r.trivial
    assert convergence_ok(scenario)


def test_feedback_threads_into_the_next_prompt(scenario):
    shortfall, violated, _ = scenario["converged"].attempts
    prompts = scenario["prompts"]
    assert prompts[0].feedback is None
    assert prompts[1].feedback.kind == "structural"
    assert "candidate at level Prop, target FOL" in prompts[1].render()
    assert prompts[2].feedback.kind == "counterexample"
    assert prompts[2].feedback.summary == violated.diagnostic
    assert prompts[2].prior == MAX_OF_SCRIPT[1]
    assert "violated sub-formula" in prompts[2].render()


def test_attempt_details(scenario):
    shortfall, violated, accepted = scenario["converged"].attempts
    assert shortfall.parsed and shortfall.level is SpecLevel.PROP
    assert violated.counterexample["verdict"]["outcome"] == "POST_VIOLATED"
    assert violated.fuzz["status"] == "VIOLATED"
    assert accepted.fuzz["status"] == "PASSED" and accepted.counterexample is None


def test_unparsable_exhaustion_is_compile_error(scenario):
    r = scenario["unparsable"]
    assert len(r.attempts) == 20 and all(a.stage is Stage.PARSE_FAIL for a in r.attempts)
    assert r.classification is Classification.COMPILE_ERROR and r.accepted is None


def test_testing_failure_last_is_test_invalid(scenario):
    r = scenario["invalid"]
    assert r.attempts[-1].stage is Stage.UNIT_FAIL
    assert r.classification is Classification.TEST_INVALID


def test_classification_rule():
    def att(stage):
        return AttemptRecord(1, "", True, None, stage)
    assert classify([att(Stage.FUZZ_VIOLATED), att(Stage.ACCEPTED)]) is Classification.TEST_VALID
    assert classify([att(Stage.UNIT_FAIL), att(Stage.LEVEL_SHORTFALL)]) is \
        Classification.COMPILE_ERROR
    assert classify([att(Stage.PARSE_FAIL), att(Stage.FUZZ_TIMEOUT)]) is \
        Classification.TEST_INVALID
    assert classify([]) is Classification.COMPILE_ERROR


def test_candidate_above_target_is_accepted():
    text = ("requires: len(a) > 0\nensures: FORALL(0, i, len(a), a[i] <= __out) && "
            "SEPEXISTS(0, j, len(a), a[j] == __out)")
    r = refine(artifact("micro", "max_of"), ScriptedMock([text]), CFG)
    assert r.classification is Classification.TEST_VALID
    assert r.target is SpecLevel.FOL and r.accepted_level is SpecLevel.FOSL


def test_generator_error_ends_the_loop_with_a_note():
    r = refine(artifact("micro", "max_of"), ScriptedMock(["garbage"]), CFG)
    assert len(r.attempts) == 1 and "generator error (exhausted) at attempt 2" in r.note
    assert r.classification is Classification.COMPILE_ERROR


def test_timeout_does_not_accept():
    text = ("requires: len(a) > 0\nensures: FORALL(0, i, len(a), a[i] <= __out) && "
            "EXISTS(0, i, len(a), a[i] == __out)")
    cfg = EngineConfig(max_attempts=1, fuzz=FuzzConfig(max_execs=10**9, wall_budget=0.1))
    r = refine(artifact("micro", "max_of"), ScriptedMock([text]), cfg)
    assert r.stages == [Stage.FUZZ_TIMEOUT]
    assert r.classification is Classification.TEST_INVALID


def test_accepted_records_satisfy_the_acceptance_invariant():
    records = run_corpus(corpus("micro"), lambda a: Enumerative(),
                         EngineConfig(max_attempts=80, fuzz=FuzzConfig(max_execs=1000)))
    for r in records:
        assert len(r.attempts) <= 80
        if r.classification is Classification.TEST_VALID:
            last = r.attempts[-1]
            assert last.stage is Stage.ACCEPTED and last.parsed
            assert level_leq(r.target, last.level) and last.fuzz["status"] == "PASSED"
        assert r.tokens_out == sum(a.tokens_out for a in r.attempts)


def test_token_totals_are_sums_of_attempts(scenario):
    r = scenario["converged"]
    assert r.tokens_in == sum(a.tokens_in for a in r.attempts) > 0
    assert r.tokens_out == sum(a.tokens_out for a in r.attempts) > 0


def test_record_json_round_trip(scenario):
    r = scenario["converged"]
    doc = r.to_json(timings=True)
    back = RefinementRecord.from_json(json.loads(json.dumps(doc)))
    assert back == r
    assert "durations" not in r.to_json()["attempts"][0]
    with pytest.raises(ValueError):
        RefinementRecord.from_json({"schema": "other"})


def test_config_validation():
    with pytest.raises(ValueError):
        EngineConfig(max_attempts=0)


def test_refine_needs_unit_tests():
    a = artifact("micro", "max_of")
    from dataclasses import replace
    with pytest.raises(ValueError):
        refine(replace(a, tests=()), ScriptedMock([]), CFG)


def test_run_corpus_empty():
    assert run_corpus([], lambda a: ScriptedMock([])) == []


def test_run_corpus_order_and_parallel_determinism():
    artifacts = corpus("selector")[:3]
    cfg = EngineConfig(max_attempts=30, fuzz=FuzzConfig(max_execs=500), seed=3)
    serial = run_corpus(artifacts, lambda a: Enumerative(), cfg, parallelism=1)
    parallel = run_corpus(artifacts, lambda a: Enumerative(), cfg, parallelism=3)
    assert [r.function for r in serial] == [a.name for a in artifacts]
    assert [r.to_json() for r in serial] == [r.to_json() for r in parallel]


def test_run_corpus_skips_excluded_functions():
    text = ("fn a(x: int) -> int { return x; }\n#[test] t(1)\n\n"
            "fn b(x: int) -> int { return x; }\n\n"
            "fn c(x: int) -> int { return x; }\n#[test] t(2)\n")
    c = ingest_text(text)
    records = run_corpus(c, lambda a: ScriptedMock(["requires: true\nensures: true"]), CFG)
    assert [r.function for r in records] == ["a", "c"] and c.excluded == ["b"]


def test_pipeline_errors_are_isolated_per_function():
    def make(a):
        if a.name == "sum":
            raise ValueError("no generator for this one")
        return ScriptedMock(["requires: true\nensures: true"])
    records = run_corpus(corpus("selector")[:2], make, CFG)
    assert records[0].classification is Classification.TEST_VALID
    assert records[1].classification is Classification.COMPILE_ERROR
    assert records[1].note.startswith("pipeline error")


def test_function_seeds_differ_by_name_and_seed():
    assert function_seed(0, "a") != function_seed(0, "b")
    assert function_seed(1, "a") != function_seed(0, "a")
    assert function_seed(5, "a") == function_seed(5, "a")
