"""Concrete syntax for contracts: lexer, recursive-descent parser, printer.

Grammar (lowest precedence first)::

    contract := ["requires:" formula] ["ensures:" formula]
    formula  := disj ["==>" formula]
    disj     := conj {"||" conj}
    conj     := sep {"&&" sep}
    sep      := unary {"*" unary}
    unary    := "!" unary | atom
    atom     := "true" | "false" | "(" formula ")"
              | QUANT "(" expr "," NAME "," expr "," formula ")"
              | expr RELOP expr
              | expr "|->" ("_" | uexpr)
    expr     := C-style arithmetic over | & << >> + - * / %
    uexpr    := "-" uexpr | INT | NAME | NAME "[" expr "]" | "len(" NAME ")"
              | "(" expr ")"

A ``*`` is separating conjunction when it follows a complete formula atom and
multiplication inside an expression; a comparison swallows any ``*`` to its
right, so ``x == a * b`` multiplies. The points-to value slot only takes a
unary expression, which lets ``x |-> v1 * y |-> v2`` read as a separating
conjunction. Quantifier ranges are half-open: ``FORALL(lo, i, hi, body)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    ARITH_OPS,
    FALSE,
    QUANTIFIERS,
    REL_OPS,
    RETURN_NAME,
    TRUE,
    WILDCARD,
    And,
    BinOp,
    Binder,
    Cmp,
    Const,
    Contract,
    Formula,
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
    Wildcard,
    expr_names,
)


class ParseError(Exception):
    def __init__(self, message, line=1, col=1, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        detail = f"{line}:{col}: {message}"
        if self.expected:
            detail += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


class ScopeError(ParseError):
    pass


QUANT_ALIASES = {
    "FORALL": "FORALL",
    "EXISTS": "EXISTS",
    "EXIST": "EXISTS",
    "SEPFORALL": "SEPFORALL",
    "SEP_FORALL": "SEPFORALL",
    "SEPEXISTS": "SEPEXISTS",
    "SEP_EXISTS": "SEPEXISTS",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\n|//)
  | (?P<header>(?:requires|ensures)\s*:)
  | (?P<int>0[xX][0-9a-fA-F]+|\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\|->|==>|&&|\|\||==|!=|<=|>=|<<|>>|[<>!+\-*/%&|()\[\],])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # header, int, name, op, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        if kind == "ws":
            if value == "\n":
                line += 1
                line_start = m.end()
        else:
            if kind == "header":
                value = value.split(":")[0].strip()
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_KEYWORDS = {"true", "false", "null", "nullptr", "len"} | set(QUANT_ALIASES)

_ATOM_OPS = frozenset(REL_OPS) | {"|->"}

_EXPR_PREC = {"|": 1, "&": 2, "<<": 3, ">>": 3, "+": 4, "-": 4, "*": 5, "/": 5, "%": 5}


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.pos = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "name") and t.text in texts

    def error(self, message, expected=()):
        t = self.tok
        found = t.text or "end of input"
        raise ParseError(f"{message}, found {found!r}", t.line, t.col, expected)

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}", {text})
        t = self.tok
        self.pos += 1
        return t

    def expect_name(self) -> str:
        t = self.tok
        if t.kind != "name" or t.text in _KEYWORDS or t.text == "_":
            self.error("expected a name", {"NAME"})
        self.pos += 1
        return t.text

    # -- formulas
    def formula(self) -> Formula:
        left = self.disj()
        if self.at("==>"):
            self.pos += 1
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("||"):
            self.pos += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.sep()
        while self.at("&&"):
            self.pos += 1
            f = And(f, self.sep())
        return f

    def sep(self) -> Formula:
        f = self.unary()
        while self.at("*"):
            self.pos += 1
            f = SepConj(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.at("!"):
            self.pos += 1
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "name" and t.text in QUANT_ALIASES and self.peek().text == "(":
            return self.quantifier()
        if t.kind == "name" and t.text in ("true", "false"):
            nxt = self.peek()
            if not (nxt.kind == "op" and (nxt.text in REL_OPS or nxt.text in _EXPR_PREC
                                          or nxt.text == "|->")):
                self.pos += 1
                return TRUE if t.text == "true" else FALSE
        if self.at("("):
            start = self.pos
            try:
                lhs = self.expr()
            except ParseError:
                lhs = None
            if lhs is not None and self.tok.kind == "op" and self.tok.text in _ATOM_OPS:
                return self.atom_rest(lhs)
            self.pos = start
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return f
        if t.kind in ("int", "name") or self.at("-"):
            return self.atom_rest(self.expr())
        self.error("expected a formula", {"true", "false", "(", "!", "FORALL", "EXISTS",
                                          "SEPFORALL", "SEPEXISTS", "NAME", "INT"})

    def atom_rest(self, lhs) -> Formula:
        t = self.tok
        if t.kind == "op" and t.text in REL_OPS:
            self.pos += 1
            return Cmp(t.text, lhs, self.expr())
        if self.at("|->"):
            self.pos += 1
            if self.at("_"):
                self.pos += 1
                return PointsTo(lhs, WILDCARD)
            return PointsTo(lhs, self.unary_expr())
        self.error("expected a comparison or '|->'", set(REL_OPS) | {"|->"})

    def quantifier(self) -> Formula:
        cls = QUANTIFIERS[QUANT_ALIASES[self.tok.text]]
        self.pos += 1
        self.expect("(")
        lo = self.expr()
        self.expect(",")
        idx = self.expect_name()
        self.expect(",")
        hi = self.expr()
        self.expect(",")
        body = self.formula()
        self.expect(")")
        return cls(lo, idx, hi, body)

    # -- expressions
    def expr(self, min_prec=1):
        left = self.unary_expr()
        while True:
            t = self.tok
            prec = _EXPR_PREC.get(t.text) if t.kind == "op" else None
            if prec is None or prec < min_prec:
                return left
            self.pos += 1
            right = self.expr(prec + 1)
            left = BinOp(t.text, left, right)

    def unary_expr(self):
        if self.at("-"):
            self.pos += 1
            if self.tok.kind == "int":
                return IntLit(-self.int_token())
            return Neg(self.unary_expr())
        return self.primary()

    def int_token(self) -> int:
        text = self.tok.text
        value = int(text, 16) if text[:2] in ("0x", "0X") else int(text)
        self.pos += 1
        return value

    def primary(self):
        t = self.tok
        if t.kind == "int":
            return IntLit(self.int_token())
        if t.kind == "name":
            if t.text in ("true", "false", "null", "nullptr"):
                self.pos += 1
                return IntLit(1 if t.text == "true" else 0)
            if t.text == "len" and self.peek().text == "(":
                self.pos += 1
                self.expect("(")
                name = self.expect_name()
                self.expect(")")
                return Len(name)
            name = self.expect_name()
            if self.at("["):
                self.pos += 1
                index = self.expr()
                self.expect("]")
                return Index(name, index)
            return Name(name)
        if self.at("("):
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected an expression", {"INT", "NAME", "(", "-", "len"})


# -- scoping ----------------------------------------------------------------


class _Scope:
    """Resolves points-to value names into binders and enforces scoping.

    Without a parameter list, free names are accepted and remembered as they
    are met. ``bound`` maps each name in scope to the usage cells of the
    binder(s) it refers to; quantifier indices carry no cells.
    """

    def __init__(self, params, allow_out):
        self.strict = params is not None
        self.free = set(params or ())
        self.allow_out = allow_out
        self.binders = []

    def check_expr(self, e, bound):
        for n in expr_names(e):
            if n in bound:
                for cell in bound[n]:
                    cell[1] = True
            elif n == RETURN_NAME:
                if not self.allow_out:
                    raise ScopeError(f"'{RETURN_NAME}' may only appear in ensures")
            elif n not in self.free:
                if self.strict:
                    raise ScopeError(f"unbound name {n!r}")
                self.free.add(n)

    def _is_known(self, n, bound):
        return n in bound or n in self.free or (n == RETURN_NAME and self.allow_out)

    def _bind(self, name, bound):
        if self._is_known(name, bound) or name == RETURN_NAME:
            raise ScopeError(f"binder {name!r} shadows a name in scope")
        cell = [name, False]
        self.binders.append(cell)
        return {name: (cell,)}

    def resolve(self, f, bound: dict):
        """Return (resolved formula, binders visible after ``f``)."""
        if isinstance(f, Const):
            return f, {}
        if isinstance(f, Cmp):
            self.check_expr(f.left, bound)
            self.check_expr(f.right, bound)
            return f, {}
        if isinstance(f, PointsTo):
            self.check_expr(f.addr, bound)
            v = f.value
            if isinstance(v, Name) and not self._is_known(v.id, bound):
                return PointsTo(f.addr, Binder(v.id)), self._bind(v.id, bound)
            if isinstance(v, Binder):
                return f, self._bind(v.name, bound)
            if not isinstance(v, Wildcard):
                self.check_expr(v, bound)
            return f, {}
        if isinstance(f, Not):
            body, _ = self.resolve(f.body, bound)
            return Not(body), {}
        if isinstance(f, (And, SepConj)):
            left, lb = self.resolve(f.left, bound)
            right, rb = self.resolve(f.right, {**bound, **lb})
            return type(f)(left, right), {**lb, **rb}
        if isinstance(f, Implies):
            left, lb = self.resolve(f.left, bound)
            right, _ = self.resolve(f.right, {**bound, **lb})
            return Implies(left, right), {}
        if isinstance(f, Or):
            left, lb = self.resolve(f.left, bound)
            right, rb = self.resolve(f.right, bound)
            return Or(left, right), {n: lb[n] + rb[n] for n in lb if n in rb}
        if isinstance(f, Quantifier):
            self.check_expr(f.lo, bound)
            self.check_expr(f.hi, bound)
            if self._is_known(f.idx, bound) or f.idx == RETURN_NAME:
                raise ScopeError(f"quantifier index {f.idx!r} shadows a name in scope")
            body, _ = self.resolve(f.body, {**bound, f.idx: ()})
            return type(f)(f.lo, f.idx, f.hi, body), {}
        raise TypeError(f"not a formula: {f!r}")

    def check_used(self):
        for name, used in self.binders:
            if not used:
                raise ScopeError(f"binder {name!r} is never used; write '_' instead")


# -- entry points -----------------------------------------------------------


def parse_formula(text: str, params=None, allow_out=True) -> Formula:
    parser = _Parser(tokenize(text))
    f = parser.formula()
    if parser.tok.kind != "eof":
        parser.error("unexpected trailing input", {"end of input"})
    scope = _Scope(params, allow_out)
    f, _ = scope.resolve(f, {})
    scope.check_used()
    return f


def parse_contract(text: str, params=None) -> Contract:
    """Parse ``requires:`` / ``ensures:`` sections into a Contract.

    ``params`` (argument names, optional) turns on the unbound-name check and
    decides whether a bare name in a points-to value slot is a reference to
    an argument or a fresh binder.
    """
    tokens = tokenize(text)
    sections = {}
    i = 0
    if tokens[0].kind != "header":
        t = tokens[0]
        raise ParseError(f"expected 'requires:' or 'ensures:', found {t.text or 'end of input'!r}",
                         t.line, t.col, {"requires:", "ensures:"})
    while tokens[i].kind != "eof":
        head = tokens[i]
        if head.text in sections:
            raise ParseError(f"duplicate '{head.text}:' section", head.line, head.col)
        if head.text == "requires" and "ensures" in sections:
            raise ParseError("'requires:' must come before 'ensures:'", head.line, head.col)
        j = i + 1
        while tokens[j].kind not in ("header", "eof"):
            j += 1
        body = tokens[i + 1:j]
        if not body:
            raise ParseError(f"empty '{head.text}:' section", head.line, head.col + len(head.text) + 1,
                             {"formula"})
        eof = Token("eof", "", tokens[j].line, tokens[j].col)
        parser = _Parser(body + [eof])
        f = parser.formula()
        if parser.tok.kind != "eof":
            parser.error("unexpected trailing input", {"end of input", "&&", "||", "==>", "*"})
        sections[head.text] = f
        i = j
    scope = _Scope(params, allow_out=False)
    requires, carried = scope.resolve(sections.get("requires", TRUE), {})
    scope.allow_out = True
    ensures, _ = scope.resolve(sections.get("ensures", TRUE), dict(carried))
    scope.check_used()
    return Contract(requires, ensures)


# -- printing ---------------------------------------------------------------

_F_IMPLIES, _F_OR, _F_AND, _F_SEP, _F_NOT, _F_ATOM = range(1, 7)


def _fprec(f) -> int:
    if isinstance(f, Implies):
        return _F_IMPLIES
    if isinstance(f, Or):
        return _F_OR
    if isinstance(f, And):
        return _F_AND
    if isinstance(f, SepConj):
        return _F_SEP
    if isinstance(f, Not):
        return _F_NOT
    return _F_ATOM


def _eprec(e) -> int:
    if isinstance(e, BinOp):
        return _EXPR_PREC[e.op]
    if isinstance(e, (Neg,)) or (isinstance(e, IntLit) and e.value < 0):
        return 6
    return 7


def print_expr(e) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Len):
        return f"len({e.name})"
    if isinstance(e, Index):
        return f"{e.base}[{print_expr(e.index)}]"
    if isinstance(e, Neg):
        inner = print_expr(e.operand)
        if isinstance(e.operand, (IntLit, BinOp)):
            inner = f"({inner})"
        return "-" + inner
    if isinstance(e, BinOp):
        if e.op not in ARITH_OPS:
            raise ValueError(f"unknown operator {e.op!r}")
        p = _EXPR_PREC[e.op]
        left = print_expr(e.left)
        right = print_expr(e.right)
        if _eprec(e.left) < p:
            left = f"({left})"
        if _eprec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def _print_value(v) -> str:
    if isinstance(v, Wildcard):
        return "_"
    if isinstance(v, Binder):
        return v.name
    text = print_expr(v)
    if isinstance(v, BinOp):
        return f"({text})"
    return text


def print_formula(f) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Cmp):
        return f"{print_expr(f.left)} {f.op} {print_expr(f.right)}"
    if isinstance(f, PointsTo):
        return f"{print_expr(f.addr)} |-> {_print_value(f.value)}"
    if isinstance(f, Not):
        inner = print_formula(f.body)
        if isinstance(f.body, (Cmp, PointsTo)) or _fprec(f.body) < _F_NOT:
            inner = f"({inner})"
        return "!" + inner
    if isinstance(f, SepConj):
        return f"({print_formula(f.left)}) * ({print_formula(f.right)})"
    if isinstance(f, (And, Or)):
        p = _fprec(f)
        op = "&&" if isinstance(f, And) else "||"
        left = print_formula(f.left)
        right = print_formula(f.right)
        if _fprec(f.left) < p:
            left = f"({left})"
        if _fprec(f.right) <= p:
            right = f"({right})"
        return f"{left} {op} {right}"
    if isinstance(f, Implies):
        left = print_formula(f.left)
        if _fprec(f.left) <= _F_IMPLIES:
            left = f"({left})"
        return f"{left} ==> {print_formula(f.right)}"
    if isinstance(f, Quantifier):
        return (f"{f.keyword}({print_expr(f.lo)}, {f.idx}, {print_expr(f.hi)}, "
                f"{print_formula(f.body)})")
    raise TypeError(f"not a formula: {f!r}")


def print_contract(c: Contract) -> str:
    return f"requires: {print_formula(c.requires)}\nensures: {print_formula(c.ensures)}"
