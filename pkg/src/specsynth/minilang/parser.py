"""Lexer and recursive-descent parser for corpus entries.

An entry is a function with optional leading ``///`` doc lines and trailing
``#[test]`` blocks::

    /// Exchanges the values stored at x and y.
    fn swap(x: ptr, y: ptr) -> void {
        var z: int = *x;
        *x = *y;
        *y = z;
    }
    #[test] basic(_, _) with heap { x: [1], y: [2] }

Statements: ``var NAME: TYPE = EXPR;``, ``NAME = EXPR;``, ``*EXPR = EXPR;``,
``NAME[EXPR] = EXPR;``, ``if (EXPR) { ... } [else if ... | else { ... }]``,
``while (EXPR) { ... }``, ``return [EXPR];``, ``free(EXPR);``; ``alloc(EXPR)``
may be the whole right-hand side of a declaration or assignment. Types are
``int``, ``bool``, ``ptr``, ``int[]`` (parameters only; read-only values) and
``void`` (return type only). Expressions use C precedence over ``|| && | ^ &
== != < <= > >= << >> + - * / %`` with prefix ``- ! *`` and ``len(NAME)``.

Test arguments are integers, ``true``/``false``, ``null``, ``[v, ...]`` for
``int[]`` parameters, and ``_`` for a pointer bound by the ``with heap`` clause.
A heap entry ``q: p`` makes ``q`` alias ``p``'s block.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    ARRAY,
    BOOL,
    INT,
    PARAM_TYPES,
    PTR,
    VOID,
    Alloc,
    Assign,
    Bin,
    Free,
    FunctionDef,
    Idx,
    If,
    Length,
    Lit,
    Load,
    Param,
    Ref,
    Return,
    Store,
    Unary,
    UnitTest,
    Var,
    VarDecl,
    While,
)


class SourceError(Exception):
    def __init__(self, message, line=1, col=1):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class ParseError(SourceError):
    pass


class TypeCheckError(SourceError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\n|//[^\n]*)
  | (?P<int>0[xX][0-9a-fA-F]+|\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|==|!=|<=|>=|&&|\|\||<<|>>|[-+*/%&|^!<>=(){}\[\],;:\#])
    """,
    re.VERBOSE,
)

KEYWORDS = frozenset(
    {"fn", "var", "if", "else", "while", "return", "alloc", "free", "len", "true",
     "false", "null", "with", "heap", "int", "bool", "ptr", "void"}
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int
    offset: int


def tokenize(text: str, first_line: int = 1) -> list:
    tokens = []
    pos, line, line_start = 0, first_line, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            if m.group() == "\n":
                line += 1
                line_start = m.end()
        else:
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1, pos))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1, pos))
    return tokens


# binary operator precedence, loosest first
_BIN_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}


class _Parser:
    def __init__(self, text, first_line=1):
        self.text = text
        self.toks = tokenize(text, first_line)
        self.pos = 0
        self.branch_count = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def at(self, *texts) -> bool:
        return self.tok.kind in ("op", "name") and self.tok.text in texts

    def error(self, message):
        t = self.tok
        raise ParseError(f"{message}, found {t.text or 'end of input'!r}", t.line, t.col)

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.pos += 1
        return t

    def name(self) -> str:
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS:
            self.error("expected a name")
        self.pos += 1
        return t.text

    def integer(self) -> int:
        negative = False
        if self.at("-"):
            self.pos += 1
            negative = True
        t = self.tok
        if t.kind != "int":
            self.error("expected an integer")
        self.pos += 1
        value = int(t.text, 16) if t.text[:2] in ("0x", "0X") else int(t.text)
        return -value if negative else value

    # -- declarations
    def type_name(self, allow_void=False, allow_array=False) -> str:
        t = self.tok
        if self.at(INT, BOOL, PTR) or (allow_void and self.at(VOID)):
            self.pos += 1
            if t.text == INT and self.at("["):
                if not allow_array:
                    self.error("int[] is only allowed for parameters")
                self.pos += 1
                self.expect("]")
                return ARRAY
            return t.text
        self.error("expected a type")

    def function(self) -> FunctionDef:
        start = self.expect("fn")
        name = self.name()
        self.expect("(")
        params = []
        while not self.at(")"):
            if params:
                self.expect(",")
            pname = self.name()
            self.expect(":")
            params.append(Param(pname, self.type_name(allow_array=True)))
        self.expect(")")
        self.expect("->")
        ret = self.type_name(allow_void=True)
        if ret == ARRAY:
            raise ParseError("functions cannot return int[]", start.line, start.col)
        body = self.block()
        end = self.toks[self.pos - 1]
        source = self.text[start.offset:end.offset + 1]
        return FunctionDef(name, tuple(params), ret, body, source=source,
                           num_branches=self.branch_count)

    def block(self) -> tuple:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            stmts.append(self.statement())
        self.expect("}")
        return tuple(stmts)

    def statement(self):
        t = self.tok
        if self.at("var"):
            self.pos += 1
            name = self.name()
            self.expect(":")
            typ = self.type_name()
            self.expect("=")
            init = self.rhs()
            self.expect(";")
            return VarDecl(name, typ, init, t.line)
        if self.at("if"):
            return self.if_stmt()
        if self.at("while"):
            self.pos += 1
            branch_id = self.new_branch()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return While(branch_id, cond, self.block(), t.line)
        if self.at("return"):
            self.pos += 1
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return Return(value, t.line)
        if self.at("free"):
            self.pos += 1
            self.expect("(")
            addr = self.expr()
            self.expect(")")
            self.expect(";")
            return Free(addr, t.line)
        target = self.unary()
        self.expect("=")
        if isinstance(target, Var):
            value = self.rhs()
            self.expect(";")
            return Assign(target.name, value, t.line)
        value = self.expr()
        self.expect(";")
        if isinstance(target, Load):
            return Store(target.addr, value, t.line)
        if isinstance(target, Idx):
            return Store(Bin("+", Var(target.base), target.index), value, t.line)
        raise ParseError("left-hand side is not assignable", t.line, t.col)

    def new_branch(self) -> int:
        branch_id = self.branch_count
        self.branch_count += 1
        return branch_id

    def if_stmt(self):
        t = self.expect("if")
        branch_id = self.new_branch()
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse = ()
        if self.at("else"):
            self.pos += 1
            orelse = (self.if_stmt(),) if self.at("if") else self.block()
        return If(branch_id, cond, then, orelse, t.line)

    def rhs(self):
        if self.at("alloc"):
            self.pos += 1
            self.expect("(")
            count = self.expr()
            self.expect(")")
            return Alloc(count)
        return self.expr()

    # -- expressions
    def expr(self, min_prec=1):
        left = self.unary()
        while True:
            t = self.tok
            prec = _BIN_PREC.get(t.text) if t.kind == "op" else None
            if prec is None or prec < min_prec:
                return left
            self.pos += 1
            left = Bin(t.text, left, self.expr(prec + 1))

    def unary(self):
        if self.at("-"):
            self.pos += 1
            if self.tok.kind == "int":
                return Lit(-self.integer())
            return Unary("-", self.unary())
        if self.at("!"):
            self.pos += 1
            return Unary("!", self.unary())
        if self.at("*"):
            self.pos += 1
            return Load(self.unary())
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "int":
            return Lit(self.integer())
        if self.at("true", "false", "null"):
            self.pos += 1
            return Lit(1 if t.text == "true" else 0)
        if self.at("len"):
            self.pos += 1
            self.expect("(")
            name = self.name()
            self.expect(")")
            return Length(name)
        if self.at("alloc"):
            self.error("alloc(...) may only be the whole right-hand side of an assignment")
        if self.at("("):
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "name":
            name = self.name()
            if self.at("["):
                self.pos += 1
                index = self.expr()
                self.expect("]")
                return Idx(name, index)
            return Var(name)
        self.error("expected an expression")

    # -- tests
    def test_block(self, fn: FunctionDef) -> UnitTest:
        start = self.expect("#")
        self.expect("[")
        if self.tok.text != "test":
            self.error("expected 'test'")
        self.pos += 1
        self.expect("]")
        name = self.name()
        self.expect("(")
        raw = []
        while not self.at(")"):
            if raw:
                self.expect(",")
            raw.append((self.tok, self.test_value()))
        self.expect(")")
        heap = []
        if self.at("with"):
            self.pos += 1
            self.expect("heap")
            self.expect("{")
            while not self.at("}"):
                if heap:
                    self.expect(",")
                    if self.at("}"):
                        break
                t = self.tok
                target = self.name()
                self.expect(":")
                if self.at("["):
                    heap.append((t, target, self.int_list()))
                else:
                    heap.append((t, target, self.name()))
            self.expect("}")
        end = self.toks[self.pos - 1]
        text = self.text[start.offset:end.offset + len(end.text)]
        return _bind_test(fn, name, raw, heap, text, start)

    def test_value(self):
        if self.at("_"):
            self.pos += 1
            return "_"
        if self.at("true", "false", "null"):
            t = self.tok
            self.pos += 1
            return {"true": True, "false": False, "null": None}[t.text]
        if self.at("["):
            return self.int_list()
        return self.integer()

    def int_list(self) -> tuple:
        self.expect("[")
        values = []
        while not self.at("]"):
            if values:
                self.expect(",")
            values.append(self.integer())
        self.expect("]")
        return tuple(values)


def _bind_test(fn, name, raw, heap, text, start) -> UnitTest:
    """Check a parsed test against the signature and resolve its heap clause."""
    if len(raw) != len(fn.params):
        raise TypeCheckError(
            f"test {name!r} passes {len(raw)} argument(s) to {fn.name} which takes "
            f"{len(fn.params)}", start.line, start.col)
    blocks, refs = [], {}
    for tok, target, value in heap:
        if target not in fn.param_names or fn.param_type(target) != PTR:
            raise TypeCheckError(f"heap entry {target!r} is not a pointer parameter",
                                 tok.line, tok.col)
        if target in refs:
            raise TypeCheckError(f"duplicate heap entry {target!r}", tok.line, tok.col)
        if isinstance(value, tuple):
            refs[target] = Ref(len(blocks))
            blocks.append(value)
        elif value in refs:
            refs[target] = refs[value]
        else:
            raise TypeCheckError(f"heap entry {target!r} aliases {value!r}, which has no "
                                 "block yet", tok.line, tok.col)
    args = []
    for param, (tok, value) in zip(fn.params, raw):
        where = (tok.line, tok.col)
        if param.type == PTR:
            if value == "_":
                if param.name not in refs:
                    raise TypeCheckError(f"pointer {param.name!r} is '_' but has no heap "
                                         "entry", *where)
                args.append(refs.pop(param.name))
            elif value is None:
                if param.name in refs:
                    raise TypeCheckError(f"null pointer {param.name!r} has a heap entry",
                                         *where)
                args.append(0)
            else:
                raise TypeCheckError(f"pointer {param.name!r} takes '_' or null", *where)
        elif param.type == ARRAY:
            if not isinstance(value, tuple):
                raise TypeCheckError(f"{param.name!r} takes an array literal", *where)
            args.append(value)
        elif param.type == BOOL:
            if value not in (True, False, 0, 1):
                raise TypeCheckError(f"{param.name!r} takes true or false", *where)
            args.append(int(value))
        else:
            if isinstance(value, (tuple, str)) or value is None:
                raise TypeCheckError(f"{param.name!r} takes an integer", *where)
            args.append(int(value))
    if refs:
        raise TypeCheckError(f"heap entry {sorted(refs)[0]!r} binds a pointer passed "
                             "as null", start.line, start.col)
    return UnitTest(name, tuple(args), tuple(blocks), text=text, line=start.line)


def _doc_comment(text: str) -> str:
    doc_lines = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("///"):
            doc_lines.append(stripped[3:].strip())
        elif stripped and not stripped.startswith("//"):
            break
    return "\n".join(doc_lines)


def parse_entry(text: str, first_line: int = 1):
    """Parse one corpus entry into ``(FunctionDef, [UnitTest])``."""
    from .typecheck import check_function

    p = _Parser(text, first_line)
    fn = p.function()
    fn = FunctionDef(fn.name, fn.params, fn.ret, fn.body, doc=_doc_comment(text),
                     source=fn.source, num_branches=fn.num_branches)
    check_function(fn, first_line)
    tests = []
    while p.tok.kind != "eof":
        if not p.at("#"):
            p.error("expected '#[test]' or end of entry")
        tests.append(p.test_block(fn))
    names = [t.name for t in tests]
    for t in tests:
        if names.count(t.name) > 1:
            raise TypeCheckError(f"duplicate test name {t.name!r}", t.line, 1)
    return fn, tests


def parse_function(source: str):
    """Alias of :func:`parse_entry` for a single entry's text."""
    return parse_entry(source)


_ENTRY_START = re.compile(r"^\s*(///|fn\b)")


def split_entries(text: str) -> list:
    """Split corpus text into ``(first_line, entry_text)`` chunks.

    A new entry begins at a ``///`` line or ``fn`` line once the current
    chunk already holds a function.
    """
    entries, current, start, has_fn = [], [], 1, False
    for lineno, line in enumerate(text.splitlines(keepends=True), 1):
        m = _ENTRY_START.match(line)
        if m and has_fn:
            entries.append((start, "".join(current)))
            current, start, has_fn = [], lineno, False
        if not current and not line.strip():
            start = lineno + 1
            continue
        current.append(line)
        if m and m.group(1) == "fn":
            has_fn = True
    if current and "".join(current).strip():
        entries.append((start, "".join(current)))
    return entries


def parse_corpus_text(text: str):
    """Parse every entry; raises on the first failure (see mining for aggregation)."""
    return [parse_entry(chunk, line) for line, chunk in split_entries(text)]


__all__ = [
    "SourceError", "ParseError", "TypeCheckError", "parse_entry", "parse_function",
    "split_entries", "parse_corpus_text", "tokenize", "PARAM_TYPES", "VOID",
]
