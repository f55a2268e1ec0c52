"""The counterexample-guided refinement loop.

Each attempt asks the generator for a candidate, then gates it: it must parse,
reach the function's target level, pass every unit test and survive fuzzing.
The first failing gate becomes feedback for the next prompt.
"""

from __future__ import annotations

import enum
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .fuzz import FuzzConfig, HarnessError, Status, build_harness, fuzz_contract, run_unit_stage
from .generate import Feedback, GeneratorError, build_prompt
from .speclang import (
    ParseError,
    SpecLevel,
    count_atoms,
    is_trivial,
    level_leq,
    level_of,
    parse_contract,
)

RECORD_SCHEMA = "specsynth.refinement/1"


class Stage(str, enum.Enum):
    PARSE_FAIL = "PARSE_FAIL"
    LEVEL_SHORTFALL = "LEVEL_SHORTFALL"
    UNIT_FAIL = "UNIT_FAIL"
    FUZZ_VIOLATED = "FUZZ_VIOLATED"
    FUZZ_TIMEOUT = "FUZZ_TIMEOUT"
    ACCEPTED = "ACCEPTED"

    def __str__(self) -> str:
        return self.value


class Classification(str, enum.Enum):
    TEST_VALID = "TEST_VALID"
    TEST_INVALID = "TEST_INVALID"
    COMPILE_ERROR = "COMPILE_ERROR"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AttemptRecord:
    index: int
    text: str
    parsed: bool
    level: Optional[SpecLevel]
    stage: Stage
    diagnostic: str = ""
    counterexample: Optional[dict] = None
    fuzz: Optional[dict] = None          # status, executions, coverage of the fuzz stage
    tokens_in: int = 0
    tokens_out: int = 0
    generation_time: float = field(default=0.0, compare=False)
    testing_time: float = field(default=0.0, compare=False)

    def to_json(self, timings: bool = False) -> dict:
        d = {"index": self.index, "text": self.text, "parsed": self.parsed,
             "level": self.level.value if self.level else None, "stage": self.stage.value,
             "diagnostic": self.diagnostic, "counterexample": self.counterexample,
             "fuzz": self.fuzz, "tokens_in": self.tokens_in, "tokens_out": self.tokens_out}
        if timings:
            d["durations"] = {"generation": self.generation_time, "testing": self.testing_time}
        return d

    @classmethod
    def from_json(cls, d) -> "AttemptRecord":
        durations = d.get("durations") or {}
        return cls(d["index"], d["text"], d["parsed"],
                   SpecLevel(d["level"]) if d["level"] else None, Stage(d["stage"]),
                   d.get("diagnostic", ""), d.get("counterexample"), d.get("fuzz"),
                   d.get("tokens_in", 0), d.get("tokens_out", 0),
                   durations.get("generation", 0.0), durations.get("testing", 0.0))


@dataclass(frozen=True)
class RefinementRecord:
    function: str
    target: SpecLevel
    attempts: tuple
    classification: Classification
    accepted: Optional[str] = None
    accepted_level: Optional[SpecLevel] = None
    trivial: bool = False
    atoms: int = 0
    strongest: Optional[bool] = None     # manual annotation only; never computed
    note: str = ""

    @property
    def tokens_in(self) -> int:
        return sum(a.tokens_in for a in self.attempts)

    @property
    def tokens_out(self) -> int:
        return sum(a.tokens_out for a in self.attempts)

    @property
    def generation_time(self) -> float:
        return sum(a.generation_time for a in self.attempts)

    @property
    def testing_time(self) -> float:
        return sum(a.testing_time for a in self.attempts)

    @property
    def stages(self) -> list:
        return [a.stage for a in self.attempts]

    def to_json(self, timings: bool = False) -> dict:
        return {
            "schema": RECORD_SCHEMA,
            "function": self.function,
            "target": self.target.value,
            "classification": self.classification.value,
            "accepted": self.accepted,
            "accepted_level": self.accepted_level.value if self.accepted_level else None,
            "trivial": self.trivial,
            "atoms": self.atoms,
            "strongest": self.strongest,
            "note": self.note,
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
            "attempts": [a.to_json(timings) for a in self.attempts],
        }

    @classmethod
    def from_json(cls, d) -> "RefinementRecord":
        if d.get("schema") != RECORD_SCHEMA:
            raise ValueError(f"not a refinement record (schema {d.get('schema')!r})")
        return cls(d["function"], SpecLevel(d["target"]),
                   tuple(AttemptRecord.from_json(a) for a in d["attempts"]),
                   Classification(d["classification"]), d.get("accepted"),
                   SpecLevel(d["accepted_level"]) if d.get("accepted_level") else None,
                   d.get("trivial", False), d.get("atoms", 0), d.get("strongest"),
                   d.get("note", ""))


@dataclass(frozen=True)
class EngineConfig:
    max_attempts: int = 20
    fuzz: FuzzConfig = FuzzConfig()
    generator: str = ""
    step_limit: Optional[int] = None    # None: the fuzz configuration's step limit
    seed: int = 0
    persist_corpus: bool = False     # reuse the fuzz corpus across a function's attempts

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")

    @property
    def steps(self) -> int:
        return self.fuzz.step_limit if self.step_limit is None else self.step_limit


def classify(attempts) -> Classification:
    if any(a.stage is Stage.ACCEPTED for a in attempts):
        return Classification.TEST_VALID
    if not attempts or attempts[-1].stage in (Stage.PARSE_FAIL, Stage.LEVEL_SHORTFALL):
        return Classification.COMPILE_ERROR
    return Classification.TEST_INVALID


def function_seed(seed: int, name: str) -> int:
    return (seed * 1_000_003 + zlib.crc32(name.encode())) & 0xFFFFFFFF


def _shortfall(artifact, level: SpecLevel) -> str:
    text = f"candidate at level {level.value}, target {artifact.target_level.value}"
    if artifact.features.uses_heap and not level_leq(SpecLevel.PROP_SL, level):
        text += ("; the function touches the heap, so the contract must describe the "
                 "cells it uses with |->")
    if artifact.features.has_loop and not level_leq(SpecLevel.FOL, level):
        text += "; the function loops, so the contract needs a quantifier"
    return text


def _violation(cx) -> Feedback:
    return Feedback("counterexample", cx.feedback(), cx.blame.text if cx.blame else "")


def refine(artifact, gen, cfg: EngineConfig = EngineConfig()) -> RefinementRecord:
    """Run the refinement loop for one function until acceptance or ``max_attempts``."""
    if not artifact.tests:
        raise ValueError(f"{artifact.name}: refinement needs at least one unit test")
    target = artifact.target_level
    params = [p.name for p in artifact.fn.params]
    harness = build_harness(artifact)
    base_seed = function_seed(cfg.seed, artifact.name)
    attempts, feedback, prior, corpus, note = [], None, "", (), ""

    for index in range(1, cfg.max_attempts + 1):
        ctx = build_prompt(artifact, target, feedback, prior, index)
        start = time.monotonic()
        try:
            result = gen.generate(ctx)
        except GeneratorError as e:
            note = f"generator error ({e.kind}) at attempt {index}: {e}"
            break
        gen_time = time.monotonic() - start
        text = result.text
        tested = time.monotonic()
        base = dict(index=index, text=text, tokens_in=result.tokens_in,
                    tokens_out=result.tokens_out, generation_time=gen_time)

        def record(stage, **kw):
            a = AttemptRecord(stage=stage, testing_time=time.monotonic() - tested, **base, **kw)
            attempts.append(a)
            return a

        prior = text
        try:
            contract = parse_contract(text, params=params)
        except ParseError as e:
            record(Stage.PARSE_FAIL, parsed=False, level=None, diagnostic=str(e))
            feedback = Feedback("parse", str(e))
            continue
        level = level_of(contract)
        if not level_leq(target, level):
            diagnostic = _shortfall(artifact, level)
            record(Stage.LEVEL_SHORTFALL, parsed=True, level=level, diagnostic=diagnostic)
            feedback = Feedback("structural", diagnostic)
            continue
        unit = run_unit_stage(artifact, contract, cfg.steps)
        if unit.status is not Status.PASS:
            cx = unit.counterexample
            record(Stage.UNIT_FAIL, parsed=True, level=level, diagnostic=cx.feedback(),
                   counterexample=cx.to_json())
            feedback = _violation(cx)
            continue
        fuzz_cfg = replace(cfg.fuzz, seed=base_seed + index, step_limit=cfg.steps)
        res = fuzz_contract(artifact, contract, harness, fuzz_cfg,
                            seeds=corpus if cfg.persist_corpus else ())
        corpus = res.corpus
        summary = {"status": res.status.value, "executions": res.executions,
                   "distinct_coverage": res.distinct_coverage,
                   "skipped_pre_failed": res.skipped_pre_failed}
        if res.status is Status.VIOLATED:
            cx = res.counterexample
            record(Stage.FUZZ_VIOLATED, parsed=True, level=level, diagnostic=cx.feedback(),
                   counterexample=cx.to_json(), fuzz=summary)
            feedback = _violation(cx)
            continue
        if res.status is Status.TIMEOUT:
            diagnostic = (f"fuzzing stopped after {res.executions} executions without a "
                          f"verdict")
            record(Stage.FUZZ_TIMEOUT, parsed=True, level=level, diagnostic=diagnostic,
                   fuzz=summary)
            feedback = Feedback("timeout", diagnostic)
            continue
        record(Stage.ACCEPTED, parsed=True, level=level, fuzz=summary)
        return RefinementRecord(artifact.name, target, tuple(attempts),
                                Classification.TEST_VALID, text, level,
                                is_trivial(contract), count_atoms(contract))
    return RefinementRecord(artifact.name, target, tuple(attempts), classify(attempts),
                            note=note)


def _isolated(artifact, make_generator, cfg) -> RefinementRecord:
    try:
        return refine(artifact, make_generator(artifact), cfg)
    except (HarnessError, ValueError) as e:
        return RefinementRecord(artifact.name, artifact.target_level, (),
                                Classification.COMPILE_ERROR, note=f"pipeline error: {e}")


def run_corpus(artifacts, make_generator: Callable, cfg: EngineConfig = EngineConfig(),
               parallelism: int = 1) -> list:
    """Refine every artifact; ``make_generator(artifact)`` gives each refinement its own
    generator. Records come back in input order."""
    artifacts = list(artifacts)
    if parallelism <= 1 or len(artifacts) <= 1:
        return [_isolated(a, make_generator, cfg) for a in artifacts]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(lambda a: _isolated(a, make_generator, cfg), artifacts))
