"""Random well-formed formulas at a chosen level, for property-based testing."""

from __future__ import annotations

import random

from .ast import (
    ARITH_OPS,
    FALSE,
    REL_OPS,
    RETURN_NAME,
    TRUE,
    WILDCARD,
    And,
    BinOp,
    Binder,
    Cmp,
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
)
from .levels import SpecLevel, level_of

DEFAULT_NAMES = ("x", "y", "p", "a", RETURN_NAME)


class FormulaSampler:
    """Draws formulas of depth ≤ ``max_depth`` whose least level is exactly the target.

    Quantifier indices and points-to binders get fresh names (``i0``, ``b0``,
    ...) so the result always satisfies the scoping rules for ``names``.
    """

    def __init__(self, rng: random.Random, names=DEFAULT_NAMES, max_depth=6):
        self.rng = rng
        self.names = tuple(names)
        self.max_depth = max_depth
        self._fresh = 0

    def formula(self, level: SpecLevel):
        while True:
            self._fresh = 0
            f = self._formula(level, self.max_depth, ())
            if level_of(f) == level:
                return f

    # -- internals
    def _name(self, prefix):
        self._fresh += 1
        return f"{prefix}{self._fresh}"

    def _expr(self, depth, scope):
        r = self.rng
        pool = self.names + scope
        choice = r.randrange(7 if depth > 0 else 3)
        if choice == 0:
            return IntLit(r.choice((0, 1, 2, -1, 7, 1000, -42)))
        if choice in (1, 2):
            return Name(r.choice(pool))
        if choice == 3:
            return Index(r.choice(self.names), self._expr(depth - 1, scope))
        if choice == 4:
            return Len(r.choice(self.names))
        if choice == 5:
            return Neg(self._expr(depth - 1, scope))
        return BinOp(r.choice(ARITH_OPS), self._expr(depth - 1, scope),
                     self._expr(depth - 1, scope))

    def _atom(self, level, scope):
        r = self.rng
        heap = level in (SpecLevel.PROP_SL, SpecLevel.FOSL)
        kind = r.randrange(5 if heap else 2)
        if kind == 0 and r.random() < 0.3:
            return r.choice((TRUE, FALSE))
        if kind <= 1:
            return Cmp(r.choice(REL_OPS), self._expr(2, scope), self._expr(2, scope))
        addr = self._expr(1, scope)
        if kind == 2:
            return PointsTo(addr, WILDCARD)
        if kind == 3:
            return PointsTo(addr, self._expr(1, scope))
        # a binder and a use of it, glued by && or *
        b = self._name("b")
        use = Cmp(r.choice(REL_OPS), Name(b), self._expr(1, scope))
        glue = r.choice((And, SepConj))
        return glue(PointsTo(addr, Binder(b)), use)

    def _formula(self, level, depth, scope):
        r = self.rng
        if depth <= 1 or r.random() < 0.25:
            return self._atom(level, scope)
        ops = [Not, And, Or, Implies]
        if level in (SpecLevel.PROP_SL, SpecLevel.FOSL):
            ops.append(SepConj)
        if level in (SpecLevel.FOL, SpecLevel.FOSL):
            ops += [Forall, Exists]
        if level == SpecLevel.FOSL:
            ops += [SepForall, SepExists]
        op = r.choice(ops)
        if op is Not:
            return Not(self._formula(level, depth - 1, scope))
        if op in (Forall, Exists, SepForall, SepExists):
            idx = self._name("i")
            lo, hi = self._expr(1, scope), self._expr(1, scope)
            return op(lo, idx, hi, self._formula(level, depth - 1, scope + (idx,)))
        return op(self._formula(level, depth - 1, scope),
                  self._formula(level, depth - 1, scope))
