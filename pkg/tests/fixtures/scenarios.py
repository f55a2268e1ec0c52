"""End-to-end scenarios shared by the module tests and the acceptance report."""

import json
from collections import Counter

from specsynth.checker import Outcome
from specsynth.fuzz import FuzzConfig, Status, build_harness, fuzz_contract, replay_counterexample
from specsynth.fuzz import run_unit_stage
from specsynth.speclang import parse_contract

from conftest import SWAP_CONTRACT, artifact

CLAMP_WRONG = "requires: true\nensures: __out == x"


def swap_conformance(execs=10_000, seed=1):
    """Fuzz the exact swap contract against swap and against the broken no-op
    variant; classify every main-loop input of the swap run by aliasing."""
    swap, noswap = artifact("swap", "swap"), artifact("swap", "noswap")
    contract = parse_contract(SWAP_CONTRACT, params=["x", "y"])
    seen = Counter()

    def observe(data, decoded, outcome, verdict):
        x, y = outcome.args
        if x and y and x == y:
            seen["aliased", verdict.outcome] += 1
        elif x and y:
            seen["distinct", verdict.outcome] += 1
        else:
            seen["null", verdict.outcome] += 1

    good = fuzz_contract(swap, contract, build_harness(swap),
                         FuzzConfig(max_execs=execs, seed=seed), observe=observe)
    bad = fuzz_contract(noswap, contract, build_harness(noswap),
                        FuzzConfig(max_execs=execs, seed=seed))
    replay = replay_counterexample(json.loads(json.dumps(bad.counterexample.to_json()))) \
        if bad.counterexample else None
    return {"swap": good, "noswap": bad, "seen": seen, "replay": replay}


def swap_conformance_ok(r) -> bool:
    seen = r["seen"]
    aliased_ok = seen["aliased", Outcome.PRE_FAILED] > 0 and all(
        outcome is Outcome.PRE_FAILED for (kind, outcome) in seen if kind == "aliased")
    distinct_ok = seen["distinct", Outcome.PASS] > 0 and all(
        outcome is Outcome.PASS for (kind, outcome) in seen if kind == "distinct")
    return (r["swap"].status is Status.PASSED and aliased_ok and distinct_ok
            and r["noswap"].status is Status.VIOLATED and r["noswap"].executions <= 10_000
            and r["replay"] is not None and r["replay"].reproduced)


def pseudo_oracle(execs=100_000, seed=1):
    """A candidate that is right on every small input but wrong above 1000."""
    clamp = artifact("clamp", "clamp")
    contract = parse_contract(CLAMP_WRONG, params=["x"])
    unit = run_unit_stage(clamp, contract)
    res = fuzz_contract(clamp, contract, build_harness(clamp),
                        FuzzConfig(max_execs=execs, seed=seed))
    replay = replay_counterexample(json.loads(json.dumps(res.counterexample.to_json()))) \
        if res.counterexample else None
    return {"unit": unit, "fuzz": res, "replay": replay}


def pseudo_oracle_ok(r) -> bool:
    cx = r["fuzz"].counterexample
    return (r["unit"].status is Status.PASS and r["fuzz"].status is Status.VIOLATED
            and r["fuzz"].executions <= 100_000 and cx is not None
            and cx.decoded.args[0] > 1000 and r["replay"].reproduced)


MAX_OF_SCRIPT = [
    "requires: len(a) > 0\nensures: true",
    "requires: len(a) > 0\nensures: EXISTS(0, i, len(a), a[i] > 0)",
    "requires: len(a) > 0\n"
    "ensures: FORALL(0, i, len(a), a[i] <= __out) && EXISTS(0, i, len(a), a[i] == __out)",
]


def convergence(execs=5000):
    """The scripted three-step run on max_of, plus the two exhaustion cases."""
    from specsynth.engine import EngineConfig, refine
    from specsynth.generate import ScriptedMock

    cfg = EngineConfig(max_attempts=20, fuzz=FuzzConfig(max_execs=execs), seed=0)
    max_of = artifact("micro", "max_of")
    gen = ScriptedMock(MAX_OF_SCRIPT)
    converged = refine(max_of, gen, cfg)
    unparsable = refine(max_of, ScriptedMock(["requires: (((\nensures:"] * 20), cfg)
    # alternating parse failures and a unit-test failure, ending on the latter
    wrong = "requires: len(a) > 0\nensures: FORALL(0, i, len(a), a[i] < __out)"
    invalid = refine(max_of, ScriptedMock(["nonsense", wrong] * 10), cfg)
    return {"converged": converged, "prompts": gen.prompts, "unparsable": unparsable,
            "invalid": invalid}


def convergence_ok(r) -> bool:
    from specsynth.engine import Classification, Stage
    c = r["converged"]
    return (c.stages == [Stage.LEVEL_SHORTFALL, Stage.FUZZ_VIOLATED, Stage.ACCEPTED]
            and c.classification is Classification.TEST_VALID
            and len(r["unparsable"].attempts) == 20
            and r["unparsable"].classification is Classification.COMPILE_ERROR
            and len(r["invalid"].attempts) == 20
            and r["invalid"].attempts[-1].stage is Stage.UNIT_FAIL
            and r["invalid"].classification is Classification.TEST_INVALID)


def metric_records():
    """Three valid records (atoms 2, 0, 4; the 0-atom one trivial) and one compile error."""
    from specsynth.engine import AttemptRecord, Classification, RefinementRecord, Stage

    def record(name, target, level, atoms, trivial, stages, fuzz="PASSED"):
        attempts = tuple(
            AttemptRecord(i, "requires: true\nensures: true", s is not Stage.PARSE_FAIL,
                          level if s is not Stage.PARSE_FAIL else None, s,
                          fuzz={"status": fuzz if s is Stage.ACCEPTED else "VIOLATED",
                                "executions": 10, "distinct_coverage": 1,
                                "skipped_pre_failed": 0}
                          if s in (Stage.ACCEPTED, Stage.FUZZ_VIOLATED) else None,
                          tokens_in=100, tokens_out=10)
            for i, s in enumerate(stages, 1))
        valid = stages[-1] is Stage.ACCEPTED
        return RefinementRecord(name, target, attempts,
                                Classification.TEST_VALID if valid
                                else Classification.COMPILE_ERROR,
                                "requires: true\nensures: true" if valid else None,
                                level if valid else None, trivial, atoms)

    from specsynth.speclang import SpecLevel as L
    return [
        record("f1", L.FOL, L.FOL, 2, False, [Stage.FUZZ_VIOLATED, Stage.ACCEPTED]),
        record("f2", L.PROP, L.PROP, 0, True, [Stage.ACCEPTED]),
        record("f3", L.PROP_SL, L.FOSL, 4, False,
               [Stage.PARSE_FAIL, Stage.UNIT_FAIL, Stage.ACCEPTED]),
        record("f4", L.FOSL, None, 0, False, [Stage.PARSE_FAIL, Stage.PARSE_FAIL]),
    ]


EXPECTED_ROW = (75.0, 0.0, 25.0, 33.33, 2.0)
