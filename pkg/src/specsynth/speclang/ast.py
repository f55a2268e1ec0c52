"""Immutable AST for contract formulas and the expressions they compare."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

RETURN_NAME = "__out"

ARITH_OPS = ("+", "-", "*", "/", "%", "<<", ">>", "&", "|")
REL_OPS = ("==", "!=", "<", "<=", ">", ">=")


# -- expressions ------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Index:
    """``base[index]``: an array element, or the heap cell ``base + index``."""

    base: str
    index: "Expr"


@dataclass(frozen=True)
class Len:
    name: str


Expr = Union[IntLit, Name, BinOp, Neg, Index, Len]


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def desugar(self) -> Or:
        return Or(Not(self.left), self.right)


@dataclass(frozen=True)
class Wildcard:
    pass


WILDCARD = Wildcard()


@dataclass(frozen=True)
class Binder:
    """A fresh name capturing a cell's value at the point of the points-to."""

    name: str


PointsToValue = Union[Expr, Wildcard, Binder]


@dataclass(frozen=True)
class PointsTo:
    addr: Expr
    value: PointsToValue


@dataclass(frozen=True)
class SepConj:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quantifier:
    lo: Expr
    idx: str
    hi: Expr
    body: "Formula"

    keyword = ""


@dataclass(frozen=True)
class Forall(Quantifier):
    keyword = "FORALL"


@dataclass(frozen=True)
class Exists(Quantifier):
    keyword = "EXISTS"


@dataclass(frozen=True)
class SepForall(Quantifier):
    keyword = "SEPFORALL"


@dataclass(frozen=True)
class SepExists(Quantifier):
    keyword = "SEPEXISTS"


QUANTIFIERS = {cls.keyword: cls for cls in (Forall, Exists, SepForall, SepExists)}

Formula = Union[Const, Cmp, Not, And, Or, Implies, PointsTo, SepConj, Quantifier]


@dataclass(frozen=True)
class Contract:
    requires: Formula = TRUE
    ensures: Formula = TRUE


# -- traversal --------------------------------------------------------------


def children(f: Formula) -> tuple:
    """Formula children in blame-path order."""
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or, Implies, SepConj)):
        return (f.left, f.right)
    if isinstance(f, Quantifier):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from subformulas(c)


def subformula_at(f: Formula, path) -> Formula:
    for i in path:
        f = children(f)[i]
    return f


def expr_names(e: Expr) -> Iterator[str]:
    if isinstance(e, Name):
        yield e.id
    elif isinstance(e, BinOp):
        yield from expr_names(e.left)
        yield from expr_names(e.right)
    elif isinstance(e, Neg):
        yield from expr_names(e.operand)
    elif isinstance(e, Index):
        yield e.base
        yield from expr_names(e.index)
    elif isinstance(e, Len):
        yield e.name


def formula_exprs(f: Formula) -> Iterator[Expr]:
    """Expressions appearing directly in ``f`` (not in sub-formulas)."""
    if isinstance(f, Cmp):
        yield f.left
        yield f.right
    elif isinstance(f, PointsTo):
        yield f.addr
        if not isinstance(f.value, (Wildcard, Binder)):
            yield f.value
    elif isinstance(f, Quantifier):
        yield f.lo
        yield f.hi


def mentions(f: Formula, name: str) -> bool:
    return any(
        name in expr_names(e) for g in subformulas(f) for e in formula_exprs(g)
    )
