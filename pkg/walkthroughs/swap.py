"""Swap: an exact separation-logic contract, checked by fuzzing against the
real swap and against a broken variant whose counterexample is then replayed.

    python3 walkthroughs/swap.py
"""

import json
from pathlib import Path

from specsynth.fuzz import FuzzConfig, build_harness, fuzz_contract, replay_counterexample
from specsynth.mining import ingest_corpus
from specsynth.speclang import level_of, parse_contract, print_contract

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "swap.mini"
CONTRACT = "requires: (x |-> v1) * (y |-> v2)\nensures: (x |-> v2) * (y |-> v1)"


def main():
    corpus = ingest_corpus(CORPUS)
    contract = parse_contract(CONTRACT, params=["x", "y"])
    print(print_contract(contract))
    print(f"level {level_of(contract).value}\n")
    for artifact in corpus:
        print(f"{artifact.name}: target {artifact.target_level.value}")
        res = fuzz_contract(artifact, contract, build_harness(artifact),
                            FuzzConfig(max_execs=10_000, seed=1))
        print(f"  fuzz {res.status.value} after {res.executions} executions, "
              f"{res.skipped_pre_failed} inputs rejected by the precondition")
        if res.counterexample is not None:
            print("  " + res.counterexample.feedback().replace("\n", "\n  "))
            wire = json.loads(json.dumps(res.counterexample.to_json()))
            replay = replay_counterexample(wire)
            print(f"  replay: {'reproduced' if replay.reproduced else 'NOT reproduced'}")


if __name__ == "__main__":
    main()
