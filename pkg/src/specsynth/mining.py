"""Corpus ingestion, feature mining and contract-logic selection."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .minilang import (
    ARRAY,
    DEFAULT_STEP_LIMIT,
    FunctionDef,
    SourceError,
    iter_exprs,
    iter_stmts,
    parse_entry,
    run_test,
    split_entries,
    stmt_exprs,
)
from .minilang.ast import Alloc, Assign, Bin, Free, Idx, If, Load, Store, Var, VarDecl, While
from .speclang import SpecLevel

MANIFEST_SCHEMA = "specsynth.manifest/1"
CORPUS_SUFFIX = ".mini"


@dataclass(frozen=True)
class Features:
    has_loop: bool = False
    has_conditional: bool = False
    has_induction_var: bool = False
    heap_syntax: bool = False
    heap_dynamic: bool = False

    @property
    def uses_heap(self) -> bool:
        return self.heap_syntax or self.heap_dynamic


@dataclass(frozen=True)
class FunctionArtifact:
    fn: FunctionDef
    tests: tuple
    features: Features
    target_level: SpecLevel
    origin: str = ""

    @property
    def name(self) -> str:
        return self.fn.name

    @property
    def doc(self) -> str:
        return self.fn.doc


def _is_additive_update(s, name) -> bool:
    if not isinstance(s, Assign) or s.name != name or not isinstance(s.value, Bin):
        return False
    v = s.value
    return v.op in ("+", "-") and Var(name) in (v.left, v.right)


def static_features(fn: FunctionDef) -> Features:
    arrays = {p.name for p in fn.params if p.type == ARRAY}
    has_loop = has_conditional = has_induction = heap = False
    for s in iter_stmts(fn.body):
        if isinstance(s, While):
            has_loop = True
            read = {e.name for e in iter_exprs(s.cond) if isinstance(e, Var)}
            if any(_is_additive_update(b, n) for b in iter_stmts(s.body) for n in read):
                has_induction = True
        elif isinstance(s, If):
            has_conditional = True
        if isinstance(s, (Store, Free)):
            heap = True
        if isinstance(s, (VarDecl, Assign)):
            value = s.init if isinstance(s, VarDecl) else s.value
            if isinstance(value, Alloc):
                heap = True
        for root in stmt_exprs(s):
            for e in iter_exprs(root):
                if isinstance(e, Load) or (isinstance(e, Idx) and e.base not in arrays):
                    heap = True
    return Features(has_loop, has_conditional, has_induction, heap, False)


def dynamic_heap_feature(fn: FunctionDef, tests, step_limit=DEFAULT_STEP_LIMIT) -> bool:
    """True iff running some unit test produces a heap event (faulting runs count)."""
    return any(run_test(fn, t, step_limit).heap_trace for t in tests)


def select_language(f: Features) -> SpecLevel:
    if f.has_loop and f.uses_heap:
        return SpecLevel.FOSL
    if f.has_loop:
        return SpecLevel.FOL
    if f.uses_heap:
        return SpecLevel.PROP_SL
    return SpecLevel.PROP


def mine(fn: FunctionDef, tests, origin="", step_limit=DEFAULT_STEP_LIMIT) -> FunctionArtifact:
    static = static_features(fn)
    features = Features(static.has_loop, static.has_conditional, static.has_induction_var,
                        static.heap_syntax, dynamic_heap_feature(fn, tests, step_limit))
    return FunctionArtifact(fn, tuple(tests), features, select_language(features), origin)


class IngestError(Exception):
    """Every entry that failed to parse or type-check, as (origin, line, message)."""

    def __init__(self, failures):
        self.failures = list(failures)
        lines = [f"{origin}:{line}: {msg}" for origin, line, msg in self.failures]
        super().__init__(f"{len(self.failures)} corpus entr"
                         f"{'y' if len(self.failures) == 1 else 'ies'} failed:\n"
                         + "\n".join(lines))


class Corpus(list):
    """Artifacts in corpus order, plus the functions excluded for lacking tests."""

    def __init__(self, artifacts=(), excluded=()):
        super().__init__(artifacts)
        self.excluded = list(excluded)

    @property
    def notes(self) -> list:
        return [f"{name}: excluded (no unit tests, cannot build a fuzz harness)"
                for name in self.excluded]


def ingest_text(text: str, origin: str = "<corpus>", step_limit=DEFAULT_STEP_LIMIT) -> Corpus:
    return _ingest([(origin, text)], step_limit)


def ingest_corpus(path, step_limit=DEFAULT_STEP_LIMIT) -> Corpus:
    """Ingest a corpus file, or every ``*.mini`` file of a directory in name order."""
    path = Path(path)
    files = sorted(path.glob(f"*{CORPUS_SUFFIX}")) if path.is_dir() else [path]
    return _ingest([(str(f), f.read_text(encoding="utf-8")) for f in files], step_limit)


def _ingest(sources, step_limit) -> Corpus:
    artifacts, excluded, failures, seen = [], [], [], {}
    for origin, text in sources:
        for line, chunk in split_entries(text):
            try:
                fn, tests = parse_entry(chunk, line)
            except SourceError as e:
                failures.append((origin, e.line, e.message))
                continue
            if fn.name in seen:
                failures.append((origin, line, f"function {fn.name!r} already defined "
                                               f"in {seen[fn.name]}"))
                continue
            seen[fn.name] = origin
            if not tests:
                excluded.append(fn.name)
                continue
            artifacts.append(mine(fn, tests, origin, step_limit))
    if failures:
        raise IngestError(failures)
    return Corpus(artifacts, excluded)


def manifest(corpus) -> dict:
    return {
        "schema": MANIFEST_SCHEMA,
        "functions": [
            {
                "name": a.name,
                "origin": a.origin,
                "params": [[p.name, p.type] for p in a.fn.params],
                "returns": a.fn.ret,
                "features": asdict(a.features),
                "target_level": a.target_level.value,
                "tests": len(a.tests),
            }
            for a in corpus
        ],
        "excluded": list(getattr(corpus, "excluded", [])),
    }


def manifest_json(corpus) -> str:
    return json.dumps(manifest(corpus), indent=2, sort_keys=True) + "\n"
