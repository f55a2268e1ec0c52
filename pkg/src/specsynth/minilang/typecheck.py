"""Static checks: declared names, scalar/array use, returns."""

from __future__ import annotations

from .ast import (
    ARRAY,
    BOOL,
    INT,
    PTR,
    SCALAR_TYPES,
    VOID,
    Alloc,
    Assign,
    Bin,
    Free,
    Idx,
    If,
    Length,
    Lit,
    Load,
    Return,
    Store,
    Unary,
    Var,
    VarDecl,
    While,
)
from .parser import TypeCheckError

_COMPARISONS = {"==", "!=", "<", "<=", ">", ">=", "&&", "||"}


class _Checker:
    def __init__(self, fn, first_line):
        self.fn = fn
        self.line = first_line
        self.scopes = [{p.name: p.type for p in fn.params}]
        if len(self.scopes[0]) != len(fn.params):
            self.fail("parameter names must be distinct")

    def fail(self, message, line=None):
        raise TypeCheckError(f"in {self.fn.name}: {message}", line or self.line, 1)

    def lookup(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        self.fail(f"undeclared name {name!r}")

    def scalar(self, e) -> str:
        t = self.expr(e)
        if t == ARRAY:
            self.fail("int[] value used as a scalar")
        return t

    def expr(self, e) -> str:
        if isinstance(e, Lit):
            return INT
        if isinstance(e, Var):
            return self.lookup(e.name)
        if isinstance(e, Unary):
            self.scalar(e.operand)
            return BOOL if e.op == "!" else INT
        if isinstance(e, Load):
            self.scalar(e.addr)
            return INT
        if isinstance(e, Idx):
            self.lookup(e.base)
            self.scalar(e.index)
            return INT
        if isinstance(e, Length):
            if self.lookup(e.name) != ARRAY:
                self.fail(f"len() needs an int[] argument, got {e.name!r}")
            return INT
        if isinstance(e, Bin):
            lt, rt = self.scalar(e.left), self.scalar(e.right)
            if e.op in _COMPARISONS:
                return BOOL
            if e.op in ("+", "-") and PTR in (lt, rt):
                return PTR
            return INT
        raise TypeError(f"not an expression: {e!r}")

    def value(self, v, target_type):
        if isinstance(v, Alloc):
            if target_type != PTR:
                self.fail("alloc(...) must be stored in a ptr")
            self.scalar(v.count)
        else:
            self.scalar(v)

    def block(self, body):
        self.scopes.append({})
        for s in body:
            self.stmt(s)
        self.scopes.pop()

    def stmt(self, s):
        self.line = s.line or self.line
        if isinstance(s, VarDecl):
            if s.type not in SCALAR_TYPES:
                self.fail(f"local {s.name!r} must have a scalar type")
            self.value(s.init, s.type)
            if any(s.name in scope for scope in self.scopes):
                self.fail(f"{s.name!r} is already declared")
            self.scopes[-1][s.name] = s.type
        elif isinstance(s, Assign):
            t = self.lookup(s.name)
            if t == ARRAY:
                self.fail(f"cannot assign to int[] parameter {s.name!r}")
            self.value(s.value, t)
        elif isinstance(s, Store):
            if isinstance(s.addr, Bin) and isinstance(s.addr.left, Var) \
                    and self.lookup(s.addr.left.name) == ARRAY:
                self.fail(f"int[] parameter {s.addr.left.name!r} is read-only")
            self.scalar(s.addr)
            self.scalar(s.value)
        elif isinstance(s, If):
            self.scalar(s.cond)
            self.block(s.then)
            self.block(s.orelse)
        elif isinstance(s, While):
            self.scalar(s.cond)
            self.block(s.body)
        elif isinstance(s, Return):
            if self.fn.ret == VOID and s.value is not None:
                self.fail("void function returns a value")
            if self.fn.ret != VOID:
                if s.value is None:
                    self.fail("missing return value")
                self.scalar(s.value)
        elif isinstance(s, Free):
            self.scalar(s.addr)
        else:
            raise TypeError(f"not a statement: {s!r}")


def _returns(body) -> bool:
    for s in body:
        if isinstance(s, Return):
            return True
        if isinstance(s, If) and s.orelse and _returns(s.then) and _returns(s.orelse):
            return True
    return False


def check_function(fn, first_line: int = 1) -> None:
    checker = _Checker(fn, first_line)
    checker.block(fn.body)
    if fn.ret != VOID and not _returns(fn.body):
        raise TypeCheckError(f"in {fn.name}: not every path returns a value", first_line, 1)
