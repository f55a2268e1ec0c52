"""Conservative syntactic simplification, triviality and atom counting."""

from __future__ import annotations

from .ast import (
    FALSE,
    TRUE,
    And,
    BinOp,
    Cmp,
    Const,
    Contract,
    Forall,
    Implies,
    Index,
    IntLit,
    Neg,
    Not,
    Or,
    PointsTo,
    Quantifier,
    SepConj,
    SepForall,
    Wildcard,
    Binder,
    subformulas,
)
from ..words import apply_binop, compare, wrap64


def fold_expr(e):
    """Fold literal-only arithmetic; division by zero is left untouched."""
    if isinstance(e, BinOp):
        left, right = fold_expr(e.left), fold_expr(e.right)
        if isinstance(left, IntLit) and isinstance(right, IntLit):
            try:
                return IntLit(apply_binop(e.op, left.value, right.value))
            except ZeroDivisionError:
                pass
        return BinOp(e.op, left, right)
    if isinstance(e, Neg):
        inner = fold_expr(e.operand)
        if isinstance(inner, IntLit):
            return IntLit(wrap64(-inner.value))
        return Neg(inner)
    if isinstance(e, Index):
        return Index(e.base, fold_expr(e.index))
    return e


def simplify(f):
    if isinstance(f, Const):
        return f
    if isinstance(f, Cmp):
        left, right = fold_expr(f.left), fold_expr(f.right)
        if isinstance(left, IntLit) and isinstance(right, IntLit):
            return TRUE if compare(f.op, left.value, right.value) else FALSE
        return Cmp(f.op, left, right)
    if isinstance(f, PointsTo):
        value = f.value
        if not isinstance(value, (Wildcard, Binder)):
            value = fold_expr(value)
        return PointsTo(fold_expr(f.addr), value)
    if isinstance(f, Not):
        body = simplify(f.body)
        if isinstance(body, Const):
            return Const(not body.value)
        return Not(body)
    if isinstance(f, (And, SepConj)):
        left, right = simplify(f.left), simplify(f.right)
        if left == FALSE or right == FALSE:
            return FALSE
        if left == TRUE:
            return right
        if right == TRUE:
            return left
        return type(f)(left, right)
    if isinstance(f, Or):
        left, right = simplify(f.left), simplify(f.right)
        if left == TRUE or right == TRUE:
            return TRUE
        if left == FALSE:
            return right
        if right == FALSE:
            return left
        return Or(left, right)
    if isinstance(f, Implies):
        left, right = simplify(f.left), simplify(f.right)
        if left == FALSE or right == TRUE:
            return TRUE
        if left == TRUE:
            return right
        if right == FALSE:
            return simplify(Not(left))
        return Implies(left, right)
    if isinstance(f, Quantifier):
        lo, hi, body = fold_expr(f.lo), fold_expr(f.hi), simplify(f.body)
        universal = isinstance(f, (Forall, SepForall))
        if isinstance(lo, IntLit) and isinstance(hi, IntLit) and hi.value <= lo.value:
            return TRUE if universal else FALSE
        if universal and body == TRUE:
            return TRUE
        if not universal and body == FALSE:
            return FALSE
        return type(f)(lo, f.idx, hi, body)
    raise TypeError(f"not a formula: {f!r}")


def simplify_contract(c: Contract) -> Contract:
    return Contract(simplify(c.requires), simplify(c.ensures))


def is_trivial(c: Contract) -> bool:
    s = simplify_contract(c)
    return s.requires == TRUE and s.ensures == TRUE


def count_atoms(c: Contract) -> int:
    s = simplify_contract(c)
    return sum(
        1
        for side in (s.requires, s.ensures)
        for g in subformulas(side)
        if isinstance(g, (Cmp, PointsTo))
    )

