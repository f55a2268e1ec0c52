"""A deterministic contract enumerator over a function's signature.

Candidates are built from a typed vocabulary of atoms:

* pure comparisons ``t1 op t2`` over the terms of a side (parameters,
  ``len(a)``, first cells ``p[0]``, the constants 0 and 1 and, in
  postconditions, ``__out`` and values bound by the precondition);
* quantified comparisons ``FORALL/EXISTS(0, i, hi, e[i] op t)`` where
  ``e[i]`` walks an array (``hi = len(a)``) or a pointer with an integer
  length parameter (``hi = n``);
* points-to atoms ``p |-> _`` and ``p |-> t``; in preconditions also the
  binder atom ``p |-> p0`` whose value postconditions may mention;
* separating quantifiers ``SEPFORALL(0, i, n, p + i |-> v)``.

A side with k atoms is any binary tree over them whose inner nodes are
connectives of the target grammar (``&&``, ``||``, ``==>``, plus ``*`` for
separation logics); an empty side is ``true``. The enumeration is grouped into
*blocks* — total atom count, split between the two sides, tree shapes,
connectives and the atom class of every slot — and, inside a block, ordered
lexicographically by atom index. Only atom classes of the target grammar are
used and only blocks whose level is at least the target are kept, so every
candidate sits exactly at the target level. Every contract of that form with
at most ``max_atoms`` atoms appears at a finite, computable index.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, fields, is_dataclass
from functools import lru_cache

from ..minilang.ast import ARRAY, INT, PTR, VOID
from ..speclang import (
    RETURN_NAME,
    WILDCARD,
    And,
    Binder,
    Cmp,
    Contract,
    Exists,
    Forall,
    Implies,
    Index,
    IntLit,
    Len,
    Name,
    Or,
    PointsTo,
    SepConj,
    SepForall,
    SpecLevel,
    BinOp,
    level_join,
    level_leq,
    print_contract,
)
from ..speclang.ast import REL_OPS, TRUE

DEFAULT_MAX_ATOMS = 3
_IDX = "i"

PURE, QUANT, HEAP, BIND, SEPQ = "pure", "quant", "heap", "bind", "sepq"
_CLASS_LEVEL = {PURE: SpecLevel.PROP, QUANT: SpecLevel.FOL, HEAP: SpecLevel.PROP_SL,
                BIND: SpecLevel.PROP_SL, SEPQ: SpecLevel.FOSL}
_GRAMMAR = {
    SpecLevel.PROP: (PURE,),
    SpecLevel.FOL: (PURE, QUANT),
    SpecLevel.PROP_SL: (PURE, HEAP, BIND),
    SpecLevel.FOSL: (PURE, QUANT, HEAP, BIND, SEPQ),
}
_PURE_CONNECTIVES = (And, Or, Implies)
_SL_CONNECTIVES = (And, Or, Implies, SepConj)


class ExhaustedError(Exception):
    """The requested attempt lies beyond the enumeration bound."""


@dataclass(frozen=True)
class Signature:
    params: tuple   # (name, type) pairs
    returns: str = VOID

    @classmethod
    def of(cls, fn) -> "Signature":
        return cls(tuple((p.name, p.type) for p in fn.params), fn.ret)

    def names(self, kind) -> list:
        return [n for n, t in self.params if t in kind]

    def binder_name(self, p) -> str:
        taken = {n for n, _ in self.params}
        name = f"{p}0"
        while name in taken:
            name += "_"
        return name


# -- vocabulary ---------------------------------------------------------------


def _terms(sig: Signature, ensures: bool, bound=()) -> list:
    terms = []
    if ensures and sig.returns != VOID:
        terms.append(Name(RETURN_NAME))
    terms += [Name(n) for n, t in sig.params if t != ARRAY]
    terms += [Len(a) for a in sig.names((ARRAY,))]
    terms += [Index(p, IntLit(0)) for p in sig.names((PTR,))]
    terms += [Name(sig.binder_name(p)) for p in bound]
    return terms + [IntLit(0), IntLit(1)]


def _pure_atoms(terms) -> list:
    atoms = []
    for i, j in itertools.combinations(range(len(terms)), 2):
        if isinstance(terms[i], IntLit) and isinstance(terms[j], IntLit):
            continue
        atoms += [Cmp(op, terms[i], terms[j]) for op in REL_OPS]
    return atoms


def _ranges(sig: Signature, ensures: bool) -> list:
    """``(hi, element)`` pairs a quantifier can walk."""
    out = [(Len(a), Index(a, Name(_IDX))) for a in sig.names((ARRAY,))]
    pointers = sig.names((PTR,))
    if ensures and sig.returns == PTR:
        pointers.append(RETURN_NAME)
    for n in sig.names((INT,)):
        out += [(Name(n), Index(p, Name(_IDX))) for p in pointers]
    return out


def _quant_atoms(sig, ensures, terms) -> list:
    targets = [t for t in terms if not isinstance(t, (Index, Len))]
    atoms = []
    for hi, element in _ranges(sig, ensures):
        for q in (Forall, Exists):
            for t in targets:
                if isinstance(t, Name) and t == hi:
                    continue
                atoms += [q(IntLit(0), _IDX, hi, Cmp(op, element, t)) for op in REL_OPS]
    return atoms


def _heap_atoms(sig, ensures, terms) -> list:
    pointers = [Name(p) for p in sig.names((PTR,))]
    if ensures and sig.returns == PTR:
        pointers.insert(0, Name(RETURN_NAME))
    values = [t for t in terms if not isinstance(t, (Index, Len))]
    atoms = []
    for p in pointers:
        atoms.append(PointsTo(p, WILDCARD))
        atoms += [PointsTo(p, v) for v in values if v != p]
    return atoms


def _sep_atoms(sig, ensures, terms) -> list:
    pointers = sig.names((PTR,))
    if ensures and sig.returns == PTR:
        pointers.insert(0, RETURN_NAME)
    scalars = [t for t in terms if isinstance(t, (Name, IntLit))
               and not (isinstance(t, Name) and t.id in pointers)]
    atoms = []
    for n in sig.names((INT,)):
        for p in pointers:
            addr = BinOp("+", Name(p), Name(_IDX))
            values = [WILDCARD] + [v for v in scalars if v != Name(n)]
            values += [Index(q, Name(_IDX)) for q in pointers if q != p]
            values += [Index(a, Name(_IDX)) for a in sig.names((ARRAY,))]
            atoms += [SepForall(IntLit(0), _IDX, Name(n), PointsTo(addr, v)) for v in values]
    return atoms


@lru_cache(maxsize=256)
def vocabulary(sig: Signature, ensures: bool, bound: tuple = ()) -> dict:
    """Atoms per class for one side; ``bound`` names pointers whose entry values the
    precondition binds."""
    terms = _terms(sig, ensures, bound)
    vocab = {PURE: _pure_atoms(terms), QUANT: _quant_atoms(sig, ensures, terms),
             HEAP: _heap_atoms(sig, ensures, terms), SEPQ: _sep_atoms(sig, ensures, terms)}
    if not ensures:
        for p in sig.names((PTR,)):
            vocab[(BIND, p)] = [PointsTo(Name(p), Binder(sig.binder_name(p)))]
    for p in bound:
        old = Name(sig.binder_name(p))
        for cls in (PURE, QUANT, HEAP, SEPQ):
            vocab[(cls, p)] = [a for a in vocab[cls] if _mentions(a, old)]
    return vocab


def _mentions(node, name) -> bool:
    if node == name:
        return True
    if is_dataclass(node):
        return any(_mentions(getattr(node, f.name), name) for f in fields(node))
    return False


# -- shapes -------------------------------------------------------------------


@lru_cache(maxsize=None)
def _trees(k: int) -> tuple:
    """Binary tree shapes with ``k`` leaves: ``None`` is a leaf, pairs are inner nodes."""
    if k == 1:
        return (None,)
    out = []
    for left in range(1, k):
        for lt in _trees(left):
            for rt in _trees(k - left):
                out.append((lt, rt))
    return tuple(out)


def _inner(tree) -> int:
    return 0 if tree is None else 1 + _inner(tree[0]) + _inner(tree[1])


def _side_forms(k: int, connectives) -> list:
    """``(tree, connectives)`` for a side with ``k`` atoms."""
    if k == 0:
        return [(None, ())]
    return [(t, conns) for t in _trees(k)
            for conns in itertools.product(connectives, repeat=_inner(t))]


def _build(tree, conns, atoms):
    atoms, conns = iter(atoms), iter(conns)

    def go(t):
        if t is None:
            return next(atoms)
        c = next(conns)
        left = go(t[0])
        return c(left, go(t[1]))
    return go(tree)


# -- blocks -------------------------------------------------------------------


@dataclass(frozen=True)
class _Block:
    req_form: tuple
    ens_form: tuple
    req_classes: tuple
    ens_classes: tuple
    radices: tuple
    lists: tuple
    size: int


class Enumerator:
    """Random access to the candidate sequence for one signature and target."""

    def __init__(self, sig: Signature, target: SpecLevel, max_atoms: int = DEFAULT_MAX_ATOMS):
        self.sig, self.target, self.max_atoms = sig, target, max_atoms
        self._blocks, self._starts = [], []
        self._total = 0
        self._source = self._block_stream()
        self._done = False

    def _classes(self, ensures: bool) -> list:
        """Atom classes of one side. A precondition binder class ``(BIND, p)`` must be
        matched by a postcondition class ``(cls, p)`` of atoms mentioning its value:
        unused binders are ill-formed."""
        grammar = _GRAMMAR[self.target]
        pointers = self.sig.names((PTR,)) if BIND in grammar else []
        if not ensures:
            return [c for c in grammar if c != BIND] + [(BIND, p) for p in pointers]
        plain = [c for c in grammar if c != BIND]
        return plain + [(c, p) for p in pointers for c in plain]

    def _block_stream(self):
        sl = level_leq(SpecLevel.PROP_SL, self.target)
        connectives = _SL_CONNECTIVES if sl else _PURE_CONNECTIVES
        req_classes, ens_classes = self._classes(False), self._classes(True)
        for k in range(self.max_atoms + 1):
            for kr in range(k + 1):
                ke = k - kr
                for req_form in _side_forms(kr, connectives):
                    exported = _exported_slots(req_form) if kr else frozenset()
                    for ens_form in _side_forms(ke, connectives):
                        level = SpecLevel.PROP
                        if SepConj in req_form[1] or SepConj in ens_form[1]:
                            level = SpecLevel.PROP_SL
                        for rc in itertools.product(req_classes, repeat=kr):
                            binds = [c[1] for c in rc if isinstance(c, tuple)]
                            if len(binds) != len(set(binds)) or any(
                                    isinstance(c, tuple) and n not in exported
                                    for n, c in enumerate(rc)):
                                continue
                            req_vocab = vocabulary(self.sig, False)
                            ens_vocab = vocabulary(self.sig, True, tuple(sorted(binds)))
                            for ec in itertools.product(ens_classes, repeat=ke):
                                if {c[1] for c in ec if isinstance(c, tuple)} != set(binds):
                                    continue
                                lv = level
                                for c in rc + ec:
                                    lv = level_join(lv, _CLASS_LEVEL[c[0] if isinstance(
                                        c, tuple) else c])
                                if not level_leq(self.target, lv):
                                    continue
                                lists = tuple(req_vocab[c] for c in rc) + \
                                    tuple(ens_vocab[c] for c in ec)
                                radices = tuple(len(lst) for lst in lists)
                                size = 1
                                for r in radices:
                                    size *= r
                                if size:
                                    yield _Block(req_form, ens_form, rc, ec, radices, lists,
                                                 size)

    def _extend_to(self, index: int) -> bool:
        while self._total <= index and not self._done:
            block = next(self._source, None)
            if block is None:
                self._done = True
                break
            self._blocks.append(block)
            self._starts.append(self._total)
            self._total += block.size
        return index < self._total

    def bound(self) -> int:
        """Number of candidates (the completeness bound on attempts)."""
        while not self._done:
            self._extend_to(self._total)
        return self._total

    def blocks(self):
        self.bound()
        return list(self._blocks)

    def contract(self, attempt: int) -> Contract:
        """The ``attempt``-th candidate, counting from 1."""
        if attempt < 1:
            raise ValueError("attempts count from 1")
        index = attempt - 1
        if not self._extend_to(index):
            raise ExhaustedError(f"enumeration for {self.target.value} has {self._total} "
                                 f"candidates; attempt {attempt} is beyond it")
        b = bisect.bisect_right(self._starts, index) - 1
        block, offset = self._blocks[b], index - self._starts[b]
        digits = []
        for r in reversed(block.radices):
            offset, d = divmod(offset, r)
            digits.append(d)
        atoms = [lst[d] for lst, d in zip(block.lists, reversed(digits))]
        kr = len(block.req_classes)
        return Contract(self._side(block.req_form, atoms[:kr]),
                        self._side(block.ens_form, atoms[kr:]))

    @staticmethod
    def _side(form, atoms):
        tree, conns = form
        return TRUE if not atoms else _build(tree, conns, atoms)

    def text(self, attempt: int) -> str:
        return print_contract(self.contract(attempt))

    def index_of(self, contract: Contract):
        """The attempt number at which ``contract`` is produced, or None."""
        req = _decompose(contract.requires)
        ens = _decompose(contract.ensures)
        if req is None or ens is None:
            return None
        atoms_r, atoms_e = req[2], ens[2]
        for start, block in zip(self._starts, self.blocks()):
            if (block.req_form, block.ens_form) != ((req[0], req[1]), (ens[0], ens[1])) \
                    or len(block.req_classes) != len(atoms_r) \
                    or len(block.ens_classes) != len(atoms_e):
                continue
            digits = []
            for lst, atom in zip(block.lists, atoms_r + atoms_e):
                if atom not in lst:
                    break
                digits.append(lst.index(atom))
            else:
                offset = 0
                for r, d in zip(block.radices, digits):
                    offset = offset * r + d
                return start + offset + 1
        return None


def _exported_slots(form) -> frozenset:
    """Leaf positions whose binders stay in scope after the side: those reached from
    the root through conjunctions only."""
    tree, conns = form
    conns, out, pos = iter(conns), set(), [0]

    def go(t, exported):
        if t is None:
            if exported:
                out.add(pos[0])
            pos[0] += 1
            return
        keep = exported and next(conns) in (And, SepConj)
        go(t[0], keep)
        go(t[1], keep)
    go(tree, True)
    return frozenset(out)


def _decompose(f):
    """``(tree, connectives, atoms)`` of a side, mirroring :func:`_build`."""
    if f == TRUE:
        return None, (), []
    conns, atoms = [], []

    def go(g):
        if isinstance(g, (And, Or, Implies, SepConj)):
            conns.append(type(g))
            left = go(g.left)
            return left, go(g.right)
        atoms.append(g)
        return None
    tree = go(f)
    return tree, tuple(conns), atoms


@lru_cache(maxsize=64)
def enumerator_for(sig: Signature, target: SpecLevel,
                   max_atoms: int = DEFAULT_MAX_ATOMS) -> Enumerator:
    return Enumerator(sig, target, max_atoms)


def enumerate_candidates(artifact, target: SpecLevel, attempt: int,
                         max_atoms: int = DEFAULT_MAX_ATOMS) -> str:
    """Text of the ``attempt``-th candidate contract for ``artifact`` at ``target``."""
    return enumerator_for(Signature.of(artifact.fn), target, max_atoms).text(attempt)


def enumeration_bound(artifact, target: SpecLevel, max_atoms: int = DEFAULT_MAX_ATOMS) -> int:
    return enumerator_for(Signature.of(artifact.fn), target, max_atoms).bound()
