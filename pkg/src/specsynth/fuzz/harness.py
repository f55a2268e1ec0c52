"""Harnesses: total decoders from raw bytes to typed arguments and heap setup.

Each parameter consumes bytes left to right; missing bytes read as zero, so
every byte string (the empty one included) decodes to a well-typed call.

* ``int``   8 bytes, little-endian, two's complement.
* ``bool``  1 byte, its low bit.
* ``int[]`` 1 length byte (mod ``max_len + 1``), then 8 bytes per element.
* ``ptr``   1 tag byte. ``0xC0..0xFF`` aliases an earlier pointer argument
  (tag mod the number of earlier pointers), ``0xB0..0xBF`` is the null
  pointer, anything else allocates ``1 + tag % max_cells`` fresh cells whose
  values follow as 8-byte words. Without an earlier pointer an alias tag
  allocates as usual.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..minilang.ast import ARRAY, BOOL, INT, PTR, Ref
from ..words import wrap64

ALIAS_TAG = 0xC0
NULL_TAG = 0xB0
MIN_BOUND = 4
WORD_BYTES = 8


class HarnessError(Exception):
    pass


@dataclass(frozen=True)
class ParamRule:
    name: str
    type: str


@dataclass(frozen=True)
class Harness:
    function: str
    plan: tuple         # ParamRule per parameter, in order
    max_len: int = MIN_BOUND
    max_cells: int = MIN_BOUND

    def to_json(self) -> dict:
        return {"function": self.function, "params": [[r.name, r.type] for r in self.plan],
                "max_len": self.max_len, "max_cells": self.max_cells}

    @classmethod
    def from_json(cls, d) -> "Harness":
        return cls(d["function"], tuple(ParamRule(n, t) for n, t in d["params"]),
                   d["max_len"], d["max_cells"])


@dataclass(frozen=True)
class DecodedInput:
    """Arguments (ints, int tuples, :class:`Ref`) and the setup blocks they point into."""

    args: tuple
    blocks: tuple


def build_harness(artifact, max_len=None, max_cells=None) -> Harness:
    """Derive a decoder plan from the signature; bounds default to twice the largest
    array/allocation seen in the unit tests, at least 4."""
    fn = artifact.fn
    plan = []
    for p in fn.params:
        if p.type not in (INT, BOOL, ARRAY, PTR):
            raise HarnessError(f"{fn.name}: no decoding rule for parameter {p.name!r} of "
                               f"type {p.type}")
        plan.append(ParamRule(p.name, p.type))
    longest_array = max((len(a) for t in artifact.tests for a in t.args
                         if isinstance(a, tuple)), default=0)
    largest_block = max((len(b) for t in artifact.tests for b in t.blocks), default=0)
    if max_len is None:
        max_len = max(MIN_BOUND, 2 * longest_array)
    if max_cells is None:
        max_cells = max(MIN_BOUND, 2 * largest_block)
    return Harness(fn.name, tuple(plan), max_len, max_cells)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def byte(self) -> int:
        b = self.data[self.pos] if self.pos < len(self.data) else 0
        self.pos += 1
        return b

    def word(self) -> int:
        chunk = self.data[self.pos:self.pos + WORD_BYTES]
        self.pos += WORD_BYTES
        return wrap64(int.from_bytes(chunk.ljust(WORD_BYTES, b"\0"), "little"))


def decode_input(h: Harness, data: bytes) -> DecodedInput:
    r = _Reader(bytes(data))
    args, blocks, pointers = [], [], []
    for rule in h.plan:
        if rule.type == INT:
            args.append(r.word())
        elif rule.type == BOOL:
            args.append(r.byte() & 1)
        elif rule.type == ARRAY:
            n = r.byte() % (h.max_len + 1)
            args.append(tuple(r.word() for _ in range(n)))
        else:
            tag = r.byte()
            if tag >= ALIAS_TAG and pointers:
                ref = pointers[(tag - ALIAS_TAG) % len(pointers)]
            elif NULL_TAG <= tag < ALIAS_TAG:
                ref = 0
            else:
                n = 1 + tag % h.max_cells
                blocks.append(tuple(r.word() for _ in range(n)))
                ref = Ref(len(blocks) - 1)
            if ref != 0:
                pointers.append(ref)
            args.append(ref)
    return DecodedInput(tuple(args), tuple(blocks))


def encode_input(h: Harness, args, blocks=()) -> bytes:
    """Bytes that decode to ``args``/``blocks`` (clamped to the harness bounds).

    Pointer offsets cannot be expressed and are dropped; blocks are laid out in
    order of their first reference.
    """
    out = bytearray()
    pointers = []   # block indices already emitted, in pointer-argument order
    for rule, a in zip(h.plan, args):
        if rule.type == INT:
            out += (a & (2**64 - 1)).to_bytes(WORD_BYTES, "little")
        elif rule.type == BOOL:
            out.append(int(a) & 1)
        elif rule.type == ARRAY:
            values = tuple(a)[:h.max_len]
            out.append(len(values))
            for v in values:
                out += (v & (2**64 - 1)).to_bytes(WORD_BYTES, "little")
        elif not isinstance(a, Ref):
            out.append(NULL_TAG)
        elif a.block in pointers:
            out.append(ALIAS_TAG + pointers.index(a.block))
            pointers.append(a.block)
        else:
            values = tuple(blocks[a.block])[:h.max_cells] or (0,)
            out.append(len(values) - 1)
            for v in values:
                out += (v & (2**64 - 1)).to_bytes(WORD_BYTES, "little")
            pointers.append(a.block)
    return bytes(out)


def input_json(d: DecodedInput) -> dict:
    def arg(a):
        if isinstance(a, Ref):
            return {"block": a.block, "offset": a.offset}
        if isinstance(a, tuple):
            return list(a)
        return a
    return {"args": [arg(a) for a in d.args], "setup": [list(b) for b in d.blocks]}
