"""Reference satisfaction by explicit heap splitting, for small states.

This is the classical reading of separation logic, written independently of
:mod:`specsynth.checker.semantics`: a formula is judged on a *sub-heap* ``s``
of the state ``H``, ``p * q`` holds on ``s`` iff ``s`` splits into disjoint
parts satisfying ``p`` and ``q``, and the whole formula holds iff it holds on
``H`` itself. Points-to atoms hold on ``s`` iff their cell lies in ``s``
(so satisfaction is upward closed); ``!p`` and the antecedent of ``==>``
are judged on ``H``, matching the runtime checker's treatment of negation.

Rather than re-deriving each sub-heap separately, every subformula is mapped
to the set of sub-heaps it holds on. Sub-heaps are bitmasks over the cells of
``H`` and a set of sub-heaps is an integer with bit ``m`` set iff sub-heap
``m`` satisfies the formula. Binders make the result a mapping from binder
valuations to such sets.
"""

from __future__ import annotations

from ..speclang.ast import (
    And,
    BinOp,
    Binder,
    Cmp,
    Const,
    Exists,
    Forall,
    Implies,
    Index,
    IntLit,
    Len,
    Name,
    Neg,
    Not,
    Or,
    PointsTo,
    SepConj,
    SepExists,
    SepForall,
    Wildcard,
)
from ..words import apply_binop, compare, wrap64
from .semantics import MAX_QUANTIFIER_RANGE, EvalEnv, EvalError, exported_binders

MAX_ORACLE_CELLS = 6


class OracleTooLarge(Exception):
    pass


class _Sub:
    """The sub-heap lattice of a fixed state."""

    def __init__(self, cells):
        self.cells = cells
        self.bit = {a: 1 << k for k, a in enumerate(sorted(cells))}
        self.full = (1 << len(cells)) - 1
        self.everything = (1 << (self.full + 1)) - 1
        self.sep_cache = {}

    def containing(self, cell_bit) -> int:
        """All sub-heaps that include the cell."""
        out = 0
        for m in range(self.full + 1):
            if m & cell_bit:
                out |= 1 << m
        return out

    def sep(self, a, b) -> int:
        """``{s1 | s2 : s1 in a, s2 in b, s1 & s2 == 0}``"""
        key = (a, b)
        hit = self.sep_cache.get(key)
        if hit is not None:
            return hit
        left = [m for m in range(self.full + 1) if a >> m & 1]
        right = [m for m in range(self.full + 1) if b >> m & 1]
        out = 0
        for m1 in left:
            for m2 in right:
                if not m1 & m2:
                    out |= 1 << (m1 | m2)
        self.sep_cache[key] = out
        return out


def _value(e, b, cells):
    if isinstance(e, IntLit):
        return wrap64(e.value)
    if isinstance(e, Name):
        if e.id not in b:
            raise EvalError(f"unbound name {e.id!r}")
        v = b[e.id]
        if isinstance(v, tuple):
            raise EvalError(f"array {e.id!r} used as a scalar")
        return v
    if isinstance(e, BinOp):
        try:
            return apply_binop(e.op, _value(e.left, b, cells), _value(e.right, b, cells))
        except ZeroDivisionError:
            raise EvalError(f"'{e.op}' by zero") from None
    if isinstance(e, Neg):
        return wrap64(-_value(e.operand, b, cells))
    if isinstance(e, Index):
        if e.base not in b:
            raise EvalError(f"unbound name {e.base!r}")
        v, i = b[e.base], _value(e.index, b, cells)
        if isinstance(v, tuple):
            if not 0 <= i < len(v):
                raise EvalError("array index out of range")
            return v[i]
        addr = wrap64(v + i)
        if addr not in cells:
            raise EvalError(f"address {addr} is not a live cell")
        return cells[addr]
    if isinstance(e, Len):
        v = b.get(e.name)
        if not isinstance(v, tuple):
            raise EvalError(f"len({e.name}) needs an array")
        return len(v)
    raise TypeError(f"not an expression: {e!r}")


class _Oracle:
    """Sub-heap sets for the formulas judged in one environment (memoized)."""

    def __init__(self, ctx):
        self.cells = ctx.cells
        self.base = ctx.base
        self.memo = {}
        self.sub = _Sub(self.cells)

    @classmethod
    def of(cls, env: EvalEnv) -> "_Oracle":
        ctx = env.context
        if ctx.oracle is None:
            ctx.oracle = cls(ctx)
        return ctx.oracle

    def sat(self, f, b):
        """``{valuation: set of sub-heaps}`` for ``f`` under bindings ``b``."""
        if b is not self.base:
            return self._RULES[type(f)](self, f, b)
        hit = self.memo.get(id(f))
        if hit is not None and hit[0] is f:
            return hit[1]
        result = self._RULES[type(f)](self, f, b)
        self.memo[id(f)] = (f, result)
        return result

    def holds_on_full(self, result) -> bool:
        full = self.sub.full
        for mask in result.values():
            if mask >> full & 1:
                return True
        return False

    @staticmethod
    def _flat(result) -> int:
        out = 0
        for mask in result.values():
            out |= mask
        return out

    @staticmethod
    def _bind(b, ext):
        if not ext:
            return b
        merged = dict(b)
        merged.update(ext)
        return merged

    def _const(self, f, b):
        return {(): self.sub.everything} if f.value else {}

    def _cmp(self, f, b):
        ok = compare(f.op, _value(f.left, b, self.cells), _value(f.right, b, self.cells))
        return {(): self.sub.everything} if ok else {}

    def _points_to(self, f, b):
        a = _value(f.addr, b, self.cells)
        if a not in self.cells:
            return {}
        where = self.sub.containing(self.sub.bit[a])
        if isinstance(f.value, Wildcard):
            return {(): where}
        if isinstance(f.value, Binder):
            return {((f.value.name, self.cells[a]),): where}
        return {(): where} if self.cells[a] == _value(f.value, b, self.cells) else {}

    def _not(self, f, b):
        return {} if self.holds_on_full(self.sat(f.body, b)) else {(): self.sub.everything}

    def _conj(self, f, b):
        separating = type(f) is SepConj
        out = {}
        for e1, m1 in self.sat(f.left, b).items():
            for e2, m2 in self.sat(f.right, self._bind(b, e1)).items():
                m = self.sub.sep(m1, m2) if separating else m1 & m2
                if m:
                    key = tuple(sorted(e1 + e2)) if e1 and e2 else e1 or e2
                    out[key] = out.get(key, 0) | m
        return out

    def _or(self, f, b):
        left = self.sat(f.left, b)
        for e, m in left.items():
            if not e and m & 1:   # holds on the empty sub-heap: the right is a guard
                return {(): self.sub.everything}
        try:
            right = self.sat(f.right, b)
        except EvalError:
            if not left:
                raise
            right = {}
        if not any(left) and not any(right):
            out = dict(left)
            for e, m in right.items():
                out[e] = out.get(e, 0) | m
            return out
        visible = exported_binders(f)
        out = {}
        for part in (left, right):
            for e, m in part.items():
                key = tuple((n, v) for n, v in e if n in visible)
                out[key] = out.get(key, 0) | m
        return out

    def _implies(self, f, b):
        full = self.sub.full
        witnesses = [e for e, m in self.sat(f.left, b).items() if m >> full & 1]
        if not witnesses:
            return {(): self.sub.everything}
        m = 0
        for e in witnesses:
            m |= self._flat(self.sat(f.right, self._bind(b, e)))
        return {(): m} if m else {}

    def _quantifier(self, f, b):
        lo, hi = _value(f.lo, b, self.cells), _value(f.hi, b, self.cells)
        universal = isinstance(f, (Forall, SepForall))
        every = self.sub.everything
        parts = []
        for i in range(lo, hi):
            if i - lo == MAX_QUANTIFIER_RANGE:
                raise EvalError("quantifier range runs past the iteration cap")
            part = self._flat(self.sat(f.body, self._bind(b, ((f.idx, i),))))
            if universal and not part:
                return {}
            if not universal and part & 1:
                return {(): every}
            parts.append(part)
        if isinstance(f, Forall):
            m = every
            for p in parts:
                m &= p
        elif isinstance(f, SepForall):
            m = every
            for p in parts:
                m = self.sub.sep(m, p)
        else:
            m = 0
            for p in parts:
                m |= p
        return {(): m} if m else {}

    _RULES = {
        Const: _const, Cmp: _cmp, PointsTo: _points_to, Not: _not, And: _conj,
        SepConj: _conj, Or: _or, Implies: _implies, Forall: _quantifier,
        Exists: _quantifier, SepForall: _quantifier, SepExists: _quantifier,
    }


def oracle_eval_split(f, env: EvalEnv, max_cells: int = MAX_ORACLE_CELLS) -> bool:
    """Whether ``f`` holds on the whole state of ``env``, by enumerating sub-heaps."""
    oracle = env.context.oracle or _Oracle.of(env)
    if len(oracle.cells) > max_cells:
        raise OracleTooLarge(f"state has {len(oracle.cells)} cells; oracle limit is "
                             f"{max_cells}")
    return oracle.holds_on_full(oracle._RULES[type(f)](oracle, f, oracle.base))


__all__ = ["oracle_eval_split", "OracleTooLarge", "MAX_ORACLE_CELLS"]
