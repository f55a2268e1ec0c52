"""The four-level ladder of contract logics and its partial order."""

from __future__ import annotations

import enum

from .ast import (
    Contract,
    Exists,
    Forall,
    PointsTo,
    SepConj,
    SepExists,
    SepForall,
    subformulas,
)


class SpecLevel(enum.Enum):
    PROP = "Prop"
    FOL = "FOL"
    PROP_SL = "PropSL"
    FOSL = "FOSL"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text: str) -> "SpecLevel":
        key = text.replace(" ", "").replace("_", "").lower()
        for level in cls:
            if level.value.lower() == key:
                return level
        raise ValueError(f"unknown contract level {text!r}")


_COVERS = {
    (SpecLevel.PROP, SpecLevel.FOL),
    (SpecLevel.PROP, SpecLevel.PROP_SL),
    (SpecLevel.FOL, SpecLevel.FOSL),
    (SpecLevel.PROP_SL, SpecLevel.FOSL),
}


def _closure(pairs):
    order = {(a, a) for a in SpecLevel} | set(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(order):
            for c, d in list(order):
                if b == c and (a, d) not in order:
                    order.add((a, d))
                    changed = True
    return frozenset(order)


_ORDER = _closure(_COVERS)


def level_leq(a: SpecLevel, b: SpecLevel) -> bool:
    return (a, b) in _ORDER


def level_join(a: SpecLevel, b: SpecLevel) -> SpecLevel:
    uppers = [c for c in SpecLevel if level_leq(a, c) and level_leq(b, c)]
    # least upper bound: the upper bound below every other upper bound
    for c in uppers:
        if all(level_leq(c, d) for d in uppers):
            return c
    raise AssertionError("lattice has no join")  # unreachable: FOSL is top


def level_of(f) -> SpecLevel:
    """Least level whose grammar generates ``f`` (or a whole Contract)."""
    if isinstance(f, Contract):
        return level_join(level_of(f.requires), level_of(f.ensures))
    quant = heap = sep_quant = False
    for g in subformulas(f):
        if isinstance(g, (SepForall, SepExists)):
            sep_quant = True
        elif isinstance(g, (Forall, Exists)):
            quant = True
        elif isinstance(g, (PointsTo, SepConj)):
            heap = True
    if sep_quant or (quant and heap):
        return SpecLevel.FOSL
    if quant:
        return SpecLevel.FOL
    if heap:
        return SpecLevel.PROP_SL
    return SpecLevel.PROP
