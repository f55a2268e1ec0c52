"""Tracing interpreter: heap model, execution outcomes and trace replay.

Functions are compiled once into nested Python closures; each execution then
runs on a fresh :class:`_Machine` holding the heap, the heap trace, branch
coverage and the step counter.
"""

from __future__ import annotations

import bisect
import threading
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from ..words import apply_binop, wrap64
from .ast import (
    ARRAY,
    BOOL,
    Alloc,
    Assign,
    Bin,
    Free,
    FunctionDef,
    Idx,
    If,
    Length,
    Lit,
    Load,
    Ref,
    Return,
    Store,
    Unary,
    UnitTest,
    Var,
    VarDecl,
    While,
)

DEFAULT_STEP_LIMIT = 10**6
FIRST_BASE = 16

NULL_DEREF = "null-deref"
USE_AFTER_FREE = "use-after-free"
OUT_OF_BOUNDS = "out-of-bounds"
DIV_BY_ZERO = "div-by-zero"
STEP_LIMIT = "step-limit"
FAULT_KINDS = (NULL_DEREF, USE_AFTER_FREE, OUT_OF_BOUNDS, DIV_BY_ZERO, STEP_LIMIT)


class HeapEvent(NamedTuple):
    kind: str  # alloc | free | load | store
    addr: int
    value: int  # extent for alloc/free, cell value for load/store


@dataclass(frozen=True)
class HeapState:
    """Immutable heap snapshot: live cells, live allocations, next fresh base."""

    cells: tuple = ()    # sorted (addr, value) pairs
    allocs: tuple = ()   # sorted (base, extent) pairs
    next_base: int = FIRST_BASE
    _map: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_map", dict(self.cells))

    @property
    def cell_map(self) -> dict:
        return self._map

    def __contains__(self, addr) -> bool:
        return addr in self._map

    def __getitem__(self, addr) -> int:
        return self._map[addr]

    def __len__(self) -> int:
        return len(self.cells)

    @classmethod
    def from_cells(cls, cells: dict, allocs=None, next_base=None) -> "HeapState":
        """Build a state from a cell map; by default each cell is its own allocation."""
        if allocs is None:
            allocs = {a: 1 for a in cells}
        if next_base is None:
            next_base = max((b + e + 1 for b, e in allocs.items()), default=FIRST_BASE)
        return cls(tuple(sorted(cells.items())), tuple(sorted(allocs.items())), next_base)


@dataclass(frozen=True)
class ExecOutcome:
    args: tuple
    ret: Optional[int]
    pre_state: HeapState
    post_state: HeapState
    heap_trace: tuple
    coverage: frozenset
    fault: Optional[str] = None
    fault_detail: str = ""
    steps: int = 0
    param_names: tuple = ()

    @property
    def ok(self) -> bool:
        return self.fault is None


class _Fault(Exception):
    def __init__(self, kind, detail=""):
        super().__init__(kind)
        self.kind = kind
        self.detail = detail


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Machine:
    __slots__ = ("cells", "extent", "bases", "live", "next_base", "trace", "coverage",
                 "steps", "limit")

    def __init__(self, limit):
        self.cells = {}
        self.extent = {}    # base -> extent, live and freed
        self.bases = []     # every base ever allocated, ascending
        self.live = set()
        self.next_base = FIRST_BASE
        self.trace = []
        self.coverage = set()
        self.steps = 0
        self.limit = limit

    def tick(self, n=1):
        self.steps += n
        if self.steps > self.limit:
            raise _Fault(STEP_LIMIT, f"more than {self.limit} steps")

    def classify(self, addr) -> _Fault:
        if addr == 0:
            return _Fault(NULL_DEREF, "access through null pointer")
        i = bisect.bisect_right(self.bases, addr) - 1
        if i >= 0:
            base = self.bases[i]
            if addr < base + self.extent[base] and base not in self.live:
                return _Fault(USE_AFTER_FREE, f"access to freed cell {addr}")
        return _Fault(OUT_OF_BOUNDS, f"access to unallocated address {addr}")

    def allocate(self, values, traced=True) -> int:
        n = len(values)
        base = self.next_base
        self.next_base = base + n + 1  # one-cell red zone between blocks
        self.extent[base] = n
        self.bases.append(base)
        self.live.add(base)
        for i, v in enumerate(values):
            self.cells[base + i] = v
        if traced:
            self.trace.append(HeapEvent("alloc", base, n))
        return base

    def alloc(self, n) -> int:
        if n < 0:
            raise _Fault(OUT_OF_BOUNDS, f"alloc of negative size {n}")
        self.tick(n)
        return self.allocate((0,) * n)

    def free(self, addr):
        if addr == 0:
            return
        if addr not in self.live:
            if addr in self.extent:
                raise _Fault(USE_AFTER_FREE, f"double free of {addr}")
            raise _Fault(OUT_OF_BOUNDS, f"free of non-allocation address {addr}")
        n = self.extent[addr]
        self.live.discard(addr)
        for a in range(addr, addr + n):
            del self.cells[a]
        self.trace.append(HeapEvent("free", addr, n))

    def load(self, addr) -> int:
        try:
            v = self.cells[addr]
        except KeyError:
            raise self.classify(addr) from None
        self.trace.append(HeapEvent("load", addr, v))
        return v

    def store(self, addr, v):
        if addr not in self.cells:
            raise self.classify(addr)
        self.cells[addr] = v
        self.trace.append(HeapEvent("store", addr, v))

    def snapshot(self) -> HeapState:
        allocs = tuple((b, self.extent[b]) for b in self.bases if b in self.live)
        return HeapState(tuple(sorted(self.cells.items())), allocs, self.next_base)


# -- compilation ------------------------------------------------------------


def _arith(op, left, right):
    if op in ("/", "%"):
        def run(m, env):
            b = right(m, env)
            if b == 0:
                raise _Fault(DIV_BY_ZERO, f"'{op}' by zero")
            return apply_binop(op, left(m, env), b)
        return run
    if op == "+":
        return lambda m, env: wrap64(left(m, env) + right(m, env))
    if op == "-":
        return lambda m, env: wrap64(left(m, env) - right(m, env))
    return lambda m, env: apply_binop(op, left(m, env), right(m, env))


_CMP = {
    "==": lambda a, b: int(a == b),
    "!=": lambda a, b: int(a != b),
    "<": lambda a, b: int(a < b),
    "<=": lambda a, b: int(a <= b),
    ">": lambda a, b: int(a > b),
    ">=": lambda a, b: int(a >= b),
}


class _Compiler:
    def __init__(self, fn: FunctionDef):
        self.arrays = {p.name for p in fn.params if p.type == ARRAY}

    def expr(self, e):
        if isinstance(e, Lit):
            v = wrap64(e.value)
            return lambda m, env: v
        if isinstance(e, Var):
            name = e.name
            return lambda m, env: env[name]
        if isinstance(e, Bin):
            left, right = self.expr(e.left), self.expr(e.right)
            if e.op == "&&":
                return lambda m, env: int(left(m, env) != 0 and right(m, env) != 0)
            if e.op == "||":
                return lambda m, env: int(left(m, env) != 0 or right(m, env) != 0)
            if e.op in _CMP:
                cmp = _CMP[e.op]
                return lambda m, env: cmp(left(m, env), right(m, env))
            return _arith(e.op, left, right)
        if isinstance(e, Unary):
            inner = self.expr(e.operand)
            if e.op == "!":
                return lambda m, env: int(inner(m, env) == 0)
            return lambda m, env: wrap64(-inner(m, env))
        if isinstance(e, Load):
            addr = self.expr(e.addr)
            return lambda m, env: m.load(addr(m, env))
        if isinstance(e, Idx):
            base, index = e.base, self.expr(e.index)
            if base in self.arrays:
                def element(m, env):
                    values, i = env[base], index(m, env)
                    if not 0 <= i < len(values):
                        raise _Fault(OUT_OF_BOUNDS, f"{base}[{i}] outside length {len(values)}")
                    return values[i]
                return element
            return lambda m, env: m.load(wrap64(env[base] + index(m, env)))
        if isinstance(e, Length):
            name = e.name
            return lambda m, env: len(env[name])
        raise TypeError(f"not an expression: {e!r}")

    def value(self, v):
        if isinstance(v, Alloc):
            count = self.expr(v.count)
            return lambda m, env: m.alloc(count(m, env))
        return self.expr(v)

    def block(self, body):
        stmts = tuple(self.stmt(s) for s in body)

        def run(m, env):
            for s in stmts:
                s(m, env)
        return run

    def stmt(self, s):
        if isinstance(s, (VarDecl, Assign)):
            name = s.name
            value = self.value(s.init if isinstance(s, VarDecl) else s.value)
            is_bool = isinstance(s, VarDecl) and s.type == BOOL

            def assign(m, env):
                m.tick()
                v = value(m, env)
                env[name] = int(v != 0) if is_bool else v
            return assign
        if isinstance(s, Store):
            addr, value = self.expr(s.addr), self.expr(s.value)

            def store(m, env):
                m.tick()
                a = addr(m, env)
                m.store(a, value(m, env))
            return store
        if isinstance(s, If):
            bid, cond = s.branch_id, self.expr(s.cond)
            then, orelse = self.block(s.then), self.block(s.orelse)

            def branch(m, env):
                m.tick()
                taken = cond(m, env) != 0
                m.coverage.add((bid, taken))
                (then if taken else orelse)(m, env)
            return branch
        if isinstance(s, While):
            bid, cond, body = s.branch_id, self.expr(s.cond), self.block(s.body)

            def loop(m, env):
                m.tick()
                while True:
                    m.tick()
                    taken = cond(m, env) != 0
                    m.coverage.add((bid, taken))
                    if not taken:
                        return
                    body(m, env)
            return loop
        if isinstance(s, Return):
            value = self.expr(s.value) if s.value is not None else None

            def ret(m, env):
                m.tick()
                raise _Return(value(m, env) if value else None)
            return ret
        if isinstance(s, Free):
            addr = self.expr(s.addr)

            def free(m, env):
                m.tick()
                m.free(addr(m, env))
            return free
        raise TypeError(f"not a statement: {s!r}")


_compiled = {}
_compiled_lock = threading.Lock()


def _compile(fn: FunctionDef):
    key = id(fn)
    hit = _compiled.get(key)
    if hit is not None and hit[0] is fn:
        return hit[1]
    body = _Compiler(fn).block(fn.body)
    with _compiled_lock:
        _compiled[key] = (fn, body)
    return body


# -- entry points -----------------------------------------------------------


def resolve_args(args, bases) -> tuple:
    """Replace :class:`Ref` placeholders by addresses; wrap integers to words."""
    out = []
    for a in args:
        if isinstance(a, Ref):
            out.append(bases[a.block] + a.offset)
        elif isinstance(a, tuple):
            out.append(tuple(wrap64(v) for v in a))
        else:
            out.append(wrap64(int(a)))
    return tuple(out)


def execute(fn: FunctionDef, args, blocks=(), step_limit: int = DEFAULT_STEP_LIMIT) -> ExecOutcome:
    """Run ``fn`` once. Faults are recorded in the outcome, never raised."""
    if step_limit <= 0:
        raise ValueError("step_limit must be positive")
    if len(args) != len(fn.params):
        raise ValueError(f"{fn.name} takes {len(fn.params)} arguments, got {len(args)}")
    body = _compile(fn)
    m = _Machine(step_limit)
    bases = [m.allocate(tuple(wrap64(v) for v in block), traced=False) for block in blocks]
    values = resolve_args(args, bases)
    env = dict(zip(fn.param_names, values))
    pre = m.snapshot()
    ret, fault, detail = None, None, ""
    try:
        body(m, env)
    except _Return as r:
        ret = r.value
    except _Fault as f:
        fault, detail = f.kind, f.detail
    except RecursionError:
        fault, detail = STEP_LIMIT, "expression nesting too deep"
    if ret is not None and fn.ret == BOOL:
        ret = int(ret != 0)
    return ExecOutcome(values, ret, pre, m.snapshot(), tuple(m.trace),
                       frozenset(m.coverage), fault, detail, m.steps, fn.param_names)


def run_test(fn: FunctionDef, test: UnitTest, step_limit: int = DEFAULT_STEP_LIMIT) -> ExecOutcome:
    return execute(fn, test.args, test.blocks, step_limit)


class TraceMismatch(Exception):
    pass


def replay_trace(pre: HeapState, trace) -> HeapState:
    """Apply a heap trace to a snapshot; checks every load against the replayed state."""
    cells = dict(pre.cells)
    allocs = dict(pre.allocs)
    next_base = pre.next_base
    for ev in trace:
        if ev.kind == "alloc":
            for a in range(ev.addr, ev.addr + ev.value):
                cells[a] = 0
            allocs[ev.addr] = ev.value
            next_base = max(next_base, ev.addr + ev.value + 1)
        elif ev.kind == "free":
            for a in range(ev.addr, ev.addr + allocs.pop(ev.addr)):
                del cells[a]
        elif ev.kind == "store":
            if ev.addr not in cells:
                raise TraceMismatch(f"store to dead cell {ev.addr}")
            cells[ev.addr] = ev.value
        elif ev.kind == "load":
            if cells.get(ev.addr) != ev.value:
                raise TraceMismatch(f"load of {ev.addr} saw {ev.value}, replay has "
                                    f"{cells.get(ev.addr)}")
        else:
            raise TraceMismatch(f"unknown event {ev.kind!r}")
    return HeapState(tuple(sorted(cells.items())), tuple(sorted(allocs.items())), next_base)
