"""Runtime evaluation of formulas over concrete states with footprint tracking.

A formula evaluates to a tuple of *alternatives*: pairs ``(footprint,
bindings)``, one per minimal way the formula can be satisfied. ``footprint``
is the set of addresses claimed by points-to atoms in that reading;
``bindings`` holds the binder values visible to formulas that follow. An
empty tuple means the formula does not hold.

* Points-to atoms are intuitionistic: ``a |-> v`` holds iff ``a`` is a live
  cell (with value ``v``), whatever else the heap contains.
* ``p * q`` combines alternatives of ``p`` and ``q`` whose footprints are
  disjoint; ``p && q`` combines all pairs. ``FORALL`` is an iterated ``&&``
  and ``SEPFORALL`` an iterated ``*``.
* ``p || q`` collects the alternatives of both sides; ``EXISTS`` and
  ``SEPEXISTS`` collect those of every iteration.
* ``!p`` is judged against the whole state and claims no cells.
* ``p ==> q`` holds with no footprint when ``p`` does not hold, and otherwise
  as ``q`` under ``p``'s binders.

Keeping every minimal alternative (rather than, say, the first satisfied
disjunct) makes ``holds`` agree exactly with the classical semantics where
``*`` splits the heap; see :mod:`specsynth.checker.oracle`.

``&&``/``==>`` skip their right operand when the left fails, and ``||`` skips
its right operand when the left holds without claiming cells, so guards such
as ``p != 0 && p[0] > 0`` behave as in C.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Optional

from ..minilang.interp import HeapState
from ..speclang.ast import (
    And,
    BinOp,
    Binder,
    Cmp,
    Const,
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
    Quantifier,
    SepConj,
    SepForall,
    Wildcard,
    children,
)
from ..speclang.syntax import print_formula
from ..words import apply_binop, compare, wrap64

MAX_ALTERNATIVES = 4096
MAX_QUANTIFIER_RANGE = 10_000

_EMPTY = MappingProxyType({})
_NO_CELLS = frozenset()
_TRUE = ((_NO_CELLS, _EMPTY),)
_FALSE = ()


class EvalError(Exception):
    """Evaluation could not produce a truth value (distinct from ``holds=False``)."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.message = message
        self.node = node


@dataclass(frozen=True)
class Blame:
    """Where a formula failed: ``path`` is the child-index path from the side's root."""

    side: str
    path: tuple
    text: str
    kind: str
    detail: str = ""

    @property
    def path_str(self) -> str:
        return "/".join(str(i) for i in self.path)

    def to_json(self) -> dict:
        return {"side": self.side, "path": self.path_str, "formula": self.text,
                "kind": self.kind, "detail": self.detail}

    @classmethod
    def from_json(cls, d) -> "Blame":
        path = tuple(int(i) for i in d["path"].split("/")) if d["path"] else ()
        return cls(d["side"], path, d["formula"], d["kind"], d.get("detail", ""))


class Verdict:
    """Result of evaluating one formula.

    ``footprint`` is the footprint of the reported reading; ``blame`` locates the
    violated sub-formula when ``holds`` is false (computed on first access).
    """

    __slots__ = ("holds", "footprint", "detail", "bindings", "_blame", "_where")

    def __init__(self, holds, footprint=frozenset(), blame=None, detail="",
                 bindings=_EMPTY, where=None):
        self.holds = holds
        self.footprint = footprint
        self.detail = detail
        self.bindings = bindings
        self._blame = blame
        self._where = where

    @property
    def blame(self) -> Optional[Blame]:
        if self._blame is None and self._where is not None:
            root, node, side = self._where
            self._blame = make_blame(root, node, self.detail, side)
            self._where = None
        return self._blame

    def _key(self):
        return (self.holds, self.footprint, self.blame, self.detail, dict(self.bindings))

    def __eq__(self, other):
        return isinstance(other, Verdict) and self._key() == other._key()

    def __repr__(self):
        return (f"Verdict(holds={self.holds}, footprint={set(self.footprint) or '{}'}, "
                f"blame={self.blame!r}, detail={self.detail!r})")


class _Context:
    __slots__ = ("cells", "base", "memo", "oracle", "blame")

    def __init__(self, cells, base):
        self.cells = cells
        self.base = base
        self.memo = {}
        self.oracle = None
        self.blame = None


@dataclass(frozen=True)
class EvalEnv:
    """Name bindings (arguments, ``__out``, carried binders) and the state to read."""

    bindings: Mapping
    state: HeapState
    _ctx: object = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "bindings", MappingProxyType(dict(self.bindings)))
        object.__setattr__(self, "_ctx", _Context(self.state.cell_map, self.bindings))

    @property
    def context(self) -> _Context:
        return self._ctx


def kind_of(f) -> str:
    return type(f).__name__


# -- expressions ------------------------------------------------------------


def _scalar(name, v):
    if type(v) is tuple:
        raise EvalError(f"array {name!r} used as a scalar")
    return v


def compile_expr(e):
    """Compile an expression to ``fn(ctx, binds) -> int``."""
    if isinstance(e, IntLit):
        v = wrap64(e.value)
        return lambda ctx, b: v
    if isinstance(e, Name):
        n = e.id

        def name(ctx, b):
            try:
                v = b[n]
            except KeyError:
                raise EvalError(f"unbound name {n!r}") from None
            return _scalar(n, v) if type(v) is tuple else v
        return name
    if isinstance(e, BinOp):
        left, right, op = compile_expr(e.left), compile_expr(e.right), e.op

        def binop(ctx, b):
            try:
                return apply_binop(op, left(ctx, b), right(ctx, b))
            except ZeroDivisionError:
                raise EvalError(f"'{op}' by zero") from None
        return binop
    if isinstance(e, Neg):
        inner = compile_expr(e.operand)
        return lambda ctx, b: wrap64(-inner(ctx, b))
    if isinstance(e, Index):
        base, index = e.base, compile_expr(e.index)

        def element(ctx, b):
            try:
                v = b[base]
            except KeyError:
                raise EvalError(f"unbound name {base!r}") from None
            i = index(ctx, b)
            if type(v) is tuple:
                if not 0 <= i < len(v):
                    raise EvalError(f"{base}[{i}] outside array of length {len(v)}")
                return v[i]
            addr = wrap64(v + i)
            try:
                return ctx.cells[addr]
            except KeyError:
                raise EvalError(f"{base}[{i}] reads address {addr}, which is not a live "
                                "cell") from None
        return element
    if isinstance(e, Len):
        n = e.name

        def length(ctx, b):
            v = b.get(n)
            if type(v) is not tuple:
                raise EvalError(f"len({n}) needs an array")
            return len(v)
        return length
    raise TypeError(f"not an expression: {e!r}")


# -- alternatives -----------------------------------------------------------


def _prune(alts):
    """Drop duplicates and alternatives whose footprint strictly contains another's
    (with the same bindings), keeping the original order so the first reading wins."""
    if len(alts) <= 1:
        return tuple(alts)
    unique = []
    for alt in alts:
        if alt not in unique:
            unique.append(alt)
    out = [(fp, ext) for fp, ext in unique
           if not any(o_ext == ext and o_fp < fp for o_fp, o_ext in unique)]
    if len(out) > MAX_ALTERNATIVES:
        raise EvalError(f"more than {MAX_ALTERNATIVES} footprint alternatives")
    return tuple(out)


def _merge(binds, ext):
    if not ext:
        return binds
    merged = dict(binds)
    merged.update(ext)
    return merged


def _join(a, b):
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    merged.update(b)
    return MappingProxyType(merged)


def exported_binders(f) -> frozenset:
    """Binder names visible to formulas after ``f`` (mirrors the parser's scoping)."""
    if isinstance(f, PointsTo):
        return frozenset((f.value.name,)) if isinstance(f.value, Binder) else frozenset()
    if isinstance(f, (And, SepConj)):
        return exported_binders(f.left) | exported_binders(f.right)
    if isinstance(f, Or):
        return exported_binders(f.left) & exported_binders(f.right)
    return frozenset()


def _fail(ctx, node, detail):
    ctx.blame = (node, detail)
    return _FALSE


# -- formula compilation ----------------------------------------------------


_cache = {}
_CACHE_CAP = 250_000


def compile_formula(f):
    """Compile (and cache) ``f`` into ``fn(ctx, binds) -> alternatives``."""
    return _compiled(f)[1]


def _compiled(f):
    """``(f, memoized run, plain run)`` for ``f``."""
    hit = _cache.get(id(f))
    if hit is not None and hit[0] is f:
        return hit
    plain = _compile(f)
    entry = (f, _memoized(f, plain), plain)
    if len(_cache) >= _CACHE_CAP:
        _cache.clear()
    _cache[id(f)] = entry
    return entry


def _memoized(f, run):
    """Reuse results for ``f`` under the environment's own bindings (pure; no quantifier
    indices or binders in play)."""
    if isinstance(f, Const):
        return run

    def memo_run(ctx, b):
        if b is not ctx.base:
            return run(ctx, b)
        hit = ctx.memo.get(memo_run)
        if hit is not None:
            if not hit[0]:
                ctx.blame = hit[1]
            return hit[0]
        alts = run(ctx, b)
        ctx.memo[memo_run] = (alts, None if alts else ctx.blame)
        return alts
    return memo_run


def _with_node(f, fn):
    def run(ctx, b):
        try:
            return fn(ctx, b)
        except EvalError as e:
            if e.node is None:
                e.node = f
            raise
    return run


def _compile(f):
    if isinstance(f, Const):
        return (lambda ctx, b: _TRUE) if f.value else (lambda ctx, b: _fail(ctx, f, "false"))
    if isinstance(f, Cmp):
        left, right, op = compile_expr(f.left), compile_expr(f.right), f.op

        def cmp(ctx, b):
            lv, rv = left(ctx, b), right(ctx, b)
            if compare(op, lv, rv):
                return _TRUE
            return _fail(ctx, f, f"{lv} {op} {rv} is false")
        return _with_node(f, cmp)
    if isinstance(f, PointsTo):
        return _with_node(f, _compile_points_to(f))
    if isinstance(f, Not):
        body = compile_formula(f.body)

        def negation(ctx, b):
            blame = ctx.blame
            if body(ctx, b):
                return _fail(ctx, f, "negated formula holds")
            ctx.blame = blame
            return _TRUE
        return negation
    if isinstance(f, (And, SepConj)):
        return _compile_conj(f)
    if isinstance(f, Or):
        return _compile_or(f)
    if isinstance(f, Implies):
        left, right = compile_formula(f.left), compile_formula(f.right)

        def implies(ctx, b):
            blame = ctx.blame
            la = left(ctx, b)
            if not la:
                ctx.blame = blame
                return _TRUE
            out = []
            for _, ext in la:
                out.extend((fp, _EMPTY) for fp, _ in right(ctx, _merge(b, ext)))
            return _prune(out)
        return implies
    if isinstance(f, Quantifier):
        return _with_node(f, _compile_quantifier(f))
    raise TypeError(f"not a formula: {f!r}")


def _compile_points_to(f):
    addr_fn, value = compile_expr(f.addr), f.value
    if isinstance(value, Wildcard):
        def points_to_any(ctx, b):
            a = addr_fn(ctx, b)
            if a in ctx.cells:
                return ((frozenset((a,)), _EMPTY),)
            return _fail(ctx, f, f"no live cell at address {a}")
        return points_to_any
    if isinstance(value, Binder):
        name = value.name

        def points_to_bind(ctx, b):
            a = addr_fn(ctx, b)
            cells = ctx.cells
            if a in cells:
                return ((frozenset((a,)), MappingProxyType({name: cells[a]})),)
            return _fail(ctx, f, f"no live cell at address {a}")
        return points_to_bind
    expected = compile_expr(value)

    def points_to_value(ctx, b):
        a = addr_fn(ctx, b)
        cells = ctx.cells
        if a not in cells:
            return _fail(ctx, f, f"no live cell at address {a}")
        want = expected(ctx, b)
        if cells[a] != want:
            return _fail(ctx, f, f"cell {a} holds {cells[a]}, expected {want}")
        return ((frozenset((a,)), _EMPTY),)
    return points_to_value


def _compile_conj(f):
    left, right = compile_formula(f.left), compile_formula(f.right)
    separating = isinstance(f, SepConj)

    def conj(ctx, b):
        la = left(ctx, b)
        if not la:
            return _FALSE
        out = []
        overlap = None
        for fl, el in la:
            ra = right(ctx, _merge(b, el))
            if len(la) == 1 and len(ra) == 1 and not el and not ra[0][1]:
                fr = ra[0][0]   # the common single-reading case
                if not fl:
                    return ra
                if not fr:
                    return la
            for fr, er in ra:
                if separating and not fl.isdisjoint(fr):
                    overlap = fl & fr
                    continue
                out.append((fl | fr, _join(el, er)))
        if out:
            return _prune(out)
        if overlap is not None:
            cells = ", ".join(str(a) for a in sorted(overlap))
            return _fail(ctx, f, f"footprints overlap at {cells}")
        return _FALSE
    return conj


def _compile_or(f):
    left, right = compile_formula(f.left), compile_formula(f.right)
    visible = exported_binders(f)

    def project(alts):
        return [(fp, MappingProxyType({n: ext[n] for n in visible}) if visible else _EMPTY)
                for fp, ext in alts]

    def disj(ctx, b):
        la = left(ctx, b)
        if not visible:
            for fp, _ in la:
                if not fp:
                    return _TRUE
        if la:
            blame = ctx.blame
            try:
                ra = right(ctx, b)
            except EvalError:
                ra = _FALSE   # the left disjunct already decides the outcome
            ctx.blame = blame
        else:
            ra = right(ctx, b)
        if not la and not ra:
            return _fail(ctx, f, "neither disjunct holds")
        return _prune(project(la) + project(ra))
    return disj


def _range(lo_fn, hi_fn, ctx, b):
    """The index range; evaluation fails once it runs past the iteration cap (so long
    ranges are fine when an early iteration already decides the result)."""
    lo, hi = lo_fn(ctx, b), hi_fn(ctx, b)
    for k, i in enumerate(range(lo, hi)):
        if k == MAX_QUANTIFIER_RANGE:
            raise EvalError(f"quantifier range [{lo}, {hi}) runs past "
                            f"{MAX_QUANTIFIER_RANGE} iterations")
        yield i


def _compile_quantifier(f):
    lo_fn, hi_fn, idx = compile_expr(f.lo), compile_expr(f.hi), f.idx
    body = compile_formula(f.body)

    if isinstance(f, (Forall, SepForall)):
        separating = isinstance(f, SepForall)

        def universal(ctx, b):
            acc = _TRUE
            for i in _range(lo_fn, hi_fn, ctx, b):
                bi = _merge(b, {idx: i})
                alts = body(ctx, bi)
                if not alts:
                    node, detail = ctx.blame or (f.body, "")
                    ctx.blame = (node, f"{detail} (at {idx} = {i})" if detail
                                 else f"at {idx} = {i}")
                    return _FALSE
                combined = [(fa | fb, _EMPTY) for fa, _ in acc for fb, _ in alts
                            if not separating or fa.isdisjoint(fb)]
                if not combined:
                    return _fail(ctx, f, f"footprint of iteration {idx} = {i} overlaps "
                                         "earlier iterations")
                acc = _prune(combined)
            return acc
        return universal

    def existential(ctx, b):
        out = []
        for i in _range(lo_fn, hi_fn, ctx, b):
            alts = body(ctx, _merge(b, {idx: i}))
            for fp, _ in alts:
                if not fp:
                    return _TRUE
                out.append((fp, _EMPTY))
        if not out:
            return _fail(ctx, f, f"no witness for {idx}")
        return _prune(out)
    return existential


# -- entry point ------------------------------------------------------------


def find_path(root, node) -> tuple:
    """Child-index path of ``node`` (by identity, else equality) inside ``root``."""
    def search(f, path, same):
        if same(f, node):
            return path
        for i, c in enumerate(children(f)):
            found = search(c, path + (i,), same)
            if found is not None:
                return found
        return None
    found = search(root, (), lambda a, b: a is b)
    if found is None:
        found = search(root, (), lambda a, b: a == b)
    return found or ()


def make_blame(root, node, detail, side="") -> Blame:
    node = root if node is None else node
    return Blame(side, find_path(root, node), print_formula(node), kind_of(node), detail)


def eval_formula(f, env: EvalEnv, side: str = "") -> Verdict:
    """Evaluate ``f`` in ``env``. Raises :class:`EvalError` when no truth value exists."""
    hit = _cache.get(id(f))
    run = hit[2] if hit is not None and hit[0] is f else _compiled(f)[2]
    ctx = env._ctx
    ctx.blame = None
    alts = run(ctx, ctx.base)
    if alts:
        fp, ext = alts[0]
        return Verdict(True, fp, None, "", ext)
    node, detail = ctx.blame or (f, "")
    return Verdict(False, _NO_CELLS, None, detail, where=(f, node, side))


__all__ = ["EvalEnv", "EvalError", "Verdict", "Blame", "eval_formula", "compile_formula",
           "make_blame", "find_path", "exported_binders"]
