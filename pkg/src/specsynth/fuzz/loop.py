"""Unit-test stage, coverage-guided mutation loop, minimization and replay."""

from __future__ import annotations

import enum
import hashlib
import json
import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..checker import ContractVerdict, Outcome, check_contract
from ..minilang import DEFAULT_STEP_LIMIT, Ref, execute, parse_entry
from ..speclang import parse_contract, print_contract
from .harness import DecodedInput, Harness, decode_input, encode_input, input_json

MAX_INPUT_BYTES = 4096
MAX_MINIMIZE_EXECS = 1000
COUNTEREXAMPLE_SCHEMA = "specsynth.counterexample/1"

_VIOLATIONS = (Outcome.POST_VIOLATED, Outcome.EVAL_ERROR)


class Status(str, enum.Enum):
    PASS = "PASS"
    PASSED = "PASSED"
    VIOLATED = "VIOLATED"
    EVAL_ERROR = "EVAL_ERROR"
    TIMEOUT = "TIMEOUT"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FuzzConfig:
    max_execs: int = 100_000
    wall_budget: Optional[float] = None   # seconds; None = exec-bounded only
    seed: int = 0
    step_limit: int = 10_000
    corpus_cap: int = 256

    def __post_init__(self):
        for name in ("max_execs", "step_limit", "corpus_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.wall_budget is not None and self.wall_budget <= 0:
            raise ValueError("wall_budget must be positive")


# -- mutation ---------------------------------------------------------------


def _flip(data, rng, corpus):
    i = rng.randrange(len(data))
    data[i] ^= 1 << rng.randrange(8)


def _set_byte(data, rng, corpus):
    data[rng.randrange(len(data))] = rng.randrange(256)


def _delete(data, rng, corpus):
    i = rng.randrange(len(data))
    del data[i:i + rng.randint(1, len(data) - i)]


def _duplicate(data, rng, corpus):
    i = rng.randrange(len(data))
    j = rng.randint(i + 1, len(data))
    at = rng.randint(0, len(data))
    data[at:at] = data[i:j]


def _append(data, rng, corpus):
    data += bytes(rng.randrange(256) for _ in range(rng.randint(1, 8)))


def _splice(data, rng, corpus):
    other = corpus[rng.randrange(len(corpus))] if corpus else bytes(data)
    cut, other_cut = rng.randint(0, len(data)), rng.randint(0, len(other))
    data[cut:] = other[other_cut:]


MUTATIONS = (_flip, _set_byte, _delete, _duplicate, _append, _splice)


def mutate(data: bytes, rng: random.Random, corpus=()) -> bytes:
    """Apply one uniformly chosen mutation. Operators that need an existing byte fall
    back to appending when ``data`` is empty; splicing uses a member of ``corpus``."""
    op = MUTATIONS[rng.randrange(len(MUTATIONS))]
    buf = bytearray(data)
    if not buf and op not in (_append, _splice):
        op = _append
    op(buf, rng, corpus)
    return bytes(buf[:MAX_INPUT_BYTES])


# -- results ----------------------------------------------------------------


def outcome_digest(o) -> str:
    """A stable fingerprint of an execution (return value, fault, states, trace)."""
    payload = json.dumps({
        "args": [list(a) if isinstance(a, tuple) else a for a in o.args],
        "ret": o.ret, "fault": o.fault, "pre": o.pre_state.cells, "post": o.post_state.cells,
        "trace": [list(e) for e in o.heap_trace], "steps": o.steps,
    }, sort_keys=True, default=list)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def verdict_json(v: ContractVerdict) -> dict:
    return {"outcome": v.outcome.value, "side": v.side, "detail": v.detail}


@dataclass(frozen=True)
class Counterexample:
    data: bytes
    decoded: DecodedInput
    verdict: ContractVerdict
    digest: str
    function: str = ""
    source: str = ""
    contract: str = ""
    harness: Optional[Harness] = None
    step_limit: int = DEFAULT_STEP_LIMIT
    test: str = ""   # unit test name, when found by the unit stage

    @property
    def blame(self):
        return self.verdict.blame

    def to_json(self) -> dict:
        d = {
            "schema": COUNTEREXAMPLE_SCHEMA,
            "function": self.function,
            "bytes": self.data.hex(),
            **input_json(self.decoded),
            "blame": self.blame.to_json() if self.blame else None,
            "verdict": verdict_json(self.verdict),
            "digest": self.digest,
            "contract": self.contract,
            "source": self.source,
            "harness": self.harness.to_json() if self.harness else None,
            "step_limit": self.step_limit,
        }
        if self.test:
            d["test"] = self.test
        return d

    def feedback(self) -> str:
        """A compact description for refinement prompts."""
        lines = [f"{self.verdict.outcome.value} on input {input_json(self.decoded)}"]
        if self.test:
            lines[0] += f" (unit test {self.test})"
        if self.blame:
            lines.append(f"violated {self.blame.side} sub-formula `{self.blame.text}` at "
                         f"path [{self.blame.path_str}]: {self.blame.detail}")
        elif self.verdict.detail:
            lines.append(self.verdict.detail)
        return "\n".join(lines)


@dataclass(frozen=True)
class FuzzResult:
    status: Status
    executions: int
    distinct_coverage: int
    skipped_pre_failed: int
    counterexample: Optional[Counterexample] = None
    coverage_trace: tuple = field(default=(), compare=False, repr=False)
    corpus: tuple = field(default=(), compare=False, repr=False)

    def to_json(self) -> dict:
        return {"status": self.status.value, "executions": self.executions,
                "distinct_coverage": self.distinct_coverage,
                "skipped_pre_failed": self.skipped_pre_failed,
                "counterexample": self.counterexample.to_json()
                if self.counterexample else None}


@dataclass(frozen=True)
class UnitStageResult:
    status: Status            # PASS, VIOLATED or EVAL_ERROR
    tests_run: int
    counterexample: Optional[Counterexample] = None


# -- unit stage -------------------------------------------------------------


def run_unit_stage(artifact, c, step_limit=DEFAULT_STEP_LIMIT) -> UnitStageResult:
    """Check ``c`` on every unit test; the first failing test decides.

    A unit test that the precondition rejects fails the stage too: the tests
    are genuine calls, so a contract that excludes them cannot describe the
    function's intended use.
    """
    fn = artifact.fn
    for n, t in enumerate(artifact.tests, 1):
        o = execute(fn, t.args, t.blocks, step_limit)
        v = check_contract(c, o)
        if v.outcome is Outcome.PASS:
            continue
        if v.outcome is Outcome.PRE_FAILED:
            v = ContractVerdict(Outcome.PRE_FAILED, v.side,
                                f"precondition rejects unit test {t.name}: {v.detail}",
                                v.blame, v.requires)
        status = Status.EVAL_ERROR if v.outcome is Outcome.EVAL_ERROR else Status.VIOLATED
        cx = Counterexample(b"", DecodedInput(tuple(t.args), tuple(t.blocks)), v,
                            outcome_digest(o), fn.name, fn.source, print_contract(c),
                            None, step_limit, t.name)
        return UnitStageResult(status, n, cx)
    return UnitStageResult(Status.PASS, len(artifact.tests))


# -- fuzzing ----------------------------------------------------------------


class _Runner:
    def __init__(self, artifact, c, h, step_limit):
        self.fn, self.c, self.h, self.step_limit = artifact.fn, c, h, step_limit
        self.execs = 0

    def run(self, data):
        self.execs += 1
        decoded = decode_input(self.h, data)
        o = execute(self.fn, decoded.args, decoded.blocks, self.step_limit)
        return decoded, o, check_contract(self.c, o)


def _same_violation(v, ref) -> bool:
    if v.outcome is not ref.outcome:
        return False
    return (v.blame.kind if v.blame else None) == (ref.blame.kind if ref.blame else None)


def minimize(runner: _Runner, data: bytes, found, budget: int = MAX_MINIMIZE_EXECS):
    """Greedy byte-range deletion, then byte zeroing, while the violation (outcome and
    blamed operator kind) persists; at most ``budget`` extra executions.

    ``found`` is the ``(decoded, outcome, verdict)`` of ``data``; returns the
    smallest failing input with its own run.
    """
    ref = found[2]
    best = (data, *found)
    start = runner.execs

    def still_fails(candidate):
        nonlocal best
        if runner.execs - start >= budget:
            return False
        run = runner.run(candidate)
        if _same_violation(run[2], ref):
            best = (candidate, *run)
            return True
        return False

    chunk = max(1, len(data) // 2)
    while data and runner.execs - start < budget:
        i, shrunk = 0, False
        while i < len(data) and runner.execs - start < budget:
            candidate = data[:i] + data[i + chunk:]
            if still_fails(candidate):
                data, shrunk = candidate, True
            else:
                i += chunk
        if not shrunk:
            if chunk == 1:
                break
            chunk //= 2
        chunk = min(chunk, max(1, len(data)))
    for i in range(len(data)):
        if runner.execs - start >= budget:
            break
        if data[i]:
            candidate = data[:i] + b"\0" + data[i + 1:]
            if still_fails(candidate):
                data = candidate
    return best


def fuzz_contract(artifact, c, h: Harness, cfg: FuzzConfig = FuzzConfig(),
                  observe: Optional[Callable] = None, seeds=()) -> FuzzResult:
    """Coverage-guided search for an input violating ``c``.

    The unit tests, the empty input and then ``seeds`` (e.g. the corpus of an
    earlier run) start the search. ``observe(data, decoded, outcome, verdict)``
    is called after every execution of the main loop (seeds included), for
    instrumentation.
    """
    rng = random.Random(cfg.seed)
    runner = _Runner(artifact, c, h, cfg.step_limit)
    deadline = None if cfg.wall_budget is None else time.monotonic() + cfg.wall_budget
    seeds = [encode_input(h, t.args, t.blocks) for t in artifact.tests] + [b""] + list(seeds)
    corpus = deque(maxlen=cfg.corpus_cap)
    coverage, trace, skipped = set(), [], 0

    def attempt(data):
        nonlocal skipped
        decoded, o, v = runner.run(data)
        if observe is not None:
            observe(data, decoded, o, v)
        if v.outcome in _VIOLATIONS:
            data, decoded, o, v = minimize(runner, data, (decoded, o, v))
            cx = Counterexample(data, decoded, v, outcome_digest(o), artifact.fn.name,
                                artifact.fn.source, print_contract(c), h, cfg.step_limit)
            return cx
        if v.outcome is Outcome.PRE_FAILED:
            skipped += 1
        new = o.coverage - coverage
        if new:
            coverage.update(new)
            corpus.append(data)
        elif v.outcome is Outcome.PASS and not corpus:
            corpus.append(data)
        trace.append(len(coverage))
        return None

    def result(status, cx=None):
        return FuzzResult(status, runner.execs, len(coverage), skipped, cx, tuple(trace),
                          tuple(corpus))

    for data in seeds:
        if runner.execs >= cfg.max_execs:
            break
        cx = attempt(data)
        if cx is not None:
            return result(Status.VIOLATED, cx)
        if data not in corpus:
            corpus.append(data)
    while runner.execs < cfg.max_execs:
        if deadline is not None and time.monotonic() >= deadline:
            return result(Status.TIMEOUT)
        data = mutate(corpus[rng.randrange(len(corpus))], rng, corpus)
        cx = attempt(data)
        if cx is not None:
            return result(Status.VIOLATED, cx)
    return result(Status.PASSED)


# -- replay -----------------------------------------------------------------


@dataclass(frozen=True)
class ReplayResult:
    verdict: ContractVerdict
    recorded: str
    digest: str
    recorded_digest: str

    @property
    def reproduced(self) -> bool:
        return self.verdict.outcome.value == self.recorded and self.digest == \
            self.recorded_digest


def replay_counterexample(d: dict) -> ReplayResult:
    """Re-run a serialized counterexample: decode its bytes (or rebuild its unit-test
    input), execute and check the recorded contract."""
    fn, _ = parse_entry(d["source"])
    contract = parse_contract(d["contract"], params=fn.param_names)
    if d.get("harness"):
        decoded = decode_input(Harness.from_json(d["harness"]), bytes.fromhex(d["bytes"]))
    else:
        args = tuple(Ref(a["block"], a["offset"]) if isinstance(a, dict)
                     else tuple(a) if isinstance(a, list) else a for a in d["args"])
        decoded = DecodedInput(args, tuple(tuple(b) for b in d["setup"]))
    o = execute(fn, decoded.args, decoded.blocks, d.get("step_limit", DEFAULT_STEP_LIMIT))
    v = check_contract(contract, o)
    return ReplayResult(v, d["verdict"]["outcome"], outcome_digest(o), d["digest"])
