"""AST of the target language: a small C-like language over words and heap cells."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

INT, BOOL, PTR, ARRAY, VOID = "int", "bool", "ptr", "int[]", "void"
SCALAR_TYPES = (INT, BOOL, PTR)
PARAM_TYPES = (INT, BOOL, PTR, ARRAY)


# -- expressions ------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"


@dataclass(frozen=True)
class Load:
    """``*addr``"""

    addr: "Expr"


@dataclass(frozen=True)
class Idx:
    """``base[index]``: an element of an int[] value, or the cell ``base + index``."""

    base: str
    index: "Expr"


@dataclass(frozen=True)
class Length:
    name: str


@dataclass(frozen=True)
class Alloc:
    """``alloc(count)``; only valid as the whole right-hand side of var/assign."""

    count: "Expr"


Expr = Union[Lit, Var, Bin, Unary, Load, Idx, Length]


# -- statements -------------------------------------------------------------


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: str
    init: Union[Expr, Alloc]
    line: int = 0


@dataclass(frozen=True)
class Assign:
    name: str
    value: Union[Expr, Alloc]
    line: int = 0


@dataclass(frozen=True)
class Store:
    """``*addr = value`` (``p[i] = v`` is parsed into ``Store(p + i, v)``)."""

    addr: Expr
    value: Expr
    line: int = 0


@dataclass(frozen=True)
class If:
    branch_id: int
    cond: Expr
    then: tuple
    orelse: tuple
    line: int = 0


@dataclass(frozen=True)
class While:
    branch_id: int
    cond: Expr
    body: tuple
    line: int = 0


@dataclass(frozen=True)
class Return:
    value: Optional[Expr]
    line: int = 0


@dataclass(frozen=True)
class Free:
    addr: Expr
    line: int = 0


Stmt = Union[VarDecl, Assign, Store, If, While, Return, Free]


# -- functions and tests ----------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str
    type: str


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple
    ret: str
    body: tuple
    doc: str = ""
    source: str = ""
    num_branches: int = 0

    @property
    def param_names(self) -> tuple:
        return tuple(p.name for p in self.params)

    def param_type(self, name: str) -> str:
        for p in self.params:
            if p.name == name:
                return p.type
        raise KeyError(name)


@dataclass(frozen=True)
class Ref:
    """A pointer argument bound to the start (plus offset) of a setup block."""

    block: int
    offset: int = 0


@dataclass(frozen=True)
class UnitTest:
    """A literal call.

    ``args`` holds ints (int, bool, null pointers), tuples (int[] values) and
    :class:`Ref` values for pointers into ``blocks``; ``blocks`` lists the
    initial cell values of each heap allocation made before the call.
    """

    name: str
    args: tuple
    blocks: tuple = ()
    text: str = field(default="", compare=False)
    line: int = 0


# -- traversal --------------------------------------------------------------


def iter_stmts(body):
    """All statements of ``body``, nested ones included, in source order."""
    for s in body:
        yield s
        if isinstance(s, If):
            yield from iter_stmts(s.then)
            yield from iter_stmts(s.orelse)
        elif isinstance(s, While):
            yield from iter_stmts(s.body)


def stmt_exprs(s):
    """Expressions appearing directly in statement ``s``."""
    if isinstance(s, (VarDecl, Assign)):
        value = s.init if isinstance(s, VarDecl) else s.value
        yield value.count if isinstance(value, Alloc) else value
    elif isinstance(s, Store):
        yield s.addr
        yield s.value
    elif isinstance(s, (If, While)):
        yield s.cond
    elif isinstance(s, Return):
        if s.value is not None:
            yield s.value
    elif isinstance(s, Free):
        yield s.addr


def iter_exprs(e):
    yield e
    if isinstance(e, Bin):
        yield from iter_exprs(e.left)
        yield from iter_exprs(e.right)
    elif isinstance(e, Unary):
        yield from iter_exprs(e.operand)
    elif isinstance(e, Load):
        yield from iter_exprs(e.addr)
    elif isinstance(e, Idx):
        yield from iter_exprs(e.index)
