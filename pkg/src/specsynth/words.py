"""64-bit two's-complement word arithmetic shared by programs and contracts."""

from __future__ import annotations

WORD_BITS = 64
_MASK = (1 << WORD_BITS) - 1
_SIGN = 1 << (WORD_BITS - 1)
INT_MIN = -_SIGN
INT_MAX = _SIGN - 1


def wrap64(v: int) -> int:
    v &= _MASK
    return v - (1 << WORD_BITS) if v & _SIGN else v


def apply_binop(op: str, a: int, b: int) -> int:
    """Evaluate ``a op b`` on words. Raises ZeroDivisionError for ``/ 0`` and ``% 0``."""
    if op == "+":
        return wrap64(a + b)
    if op == "-":
        return wrap64(a - b)
    if op == "*":
        return wrap64(a * b)
    if op in ("/", "%"):
        if b == 0:
            raise ZeroDivisionError(op)
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        return wrap64(q) if op == "/" else wrap64(a - q * b)
    if op == "<<":
        return wrap64(a << (b & (WORD_BITS - 1)))
    if op == ">>":
        return wrap64(a >> (b & (WORD_BITS - 1)))
    if op == "&":
        return wrap64(a & b)
    if op == "|":
        return wrap64(a | b)
    if op == "^":
        return wrap64(a ^ b)
    raise ValueError(f"unknown operator {op!r}")


_COMPARE = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def compare(op: str, a: int, b: int) -> bool:
    return _COMPARE[op](a, b)
