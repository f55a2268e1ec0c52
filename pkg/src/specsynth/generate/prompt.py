"""Prompt assembly: function text, target logic, its grammar, examples and feedback."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..speclang import SpecLevel, level_leq
from .fewshot import examples_for

MAX_EXAMPLES = 10

GRAMMAR_ROWS = {
    SpecLevel.PROP: "p := true | false | p && p | p || p | !p",
    SpecLevel.FOL: "fp := p | EXISTS(lo, x, hi, fp) | FORALL(lo, x, hi, fp)",
    SpecLevel.PROP_SL: "sp := p | sp * sp | x |-> n",
    SpecLevel.FOSL: "fsp := sp | SEPEXISTS(lo, x, hi, fsp) | SEPFORALL(lo, x, hi, fsp)",
}

LOGIC_NAMES = {
    SpecLevel.PROP: "propositional logic",
    SpecLevel.FOL: "first-order logic",
    SpecLevel.PROP_SL: "propositional separation logic",
    SpecLevel.FOSL: "first-order separation logic",
}

_SYNTAX_NOTES = """\
Atoms compare integer expressions with == != < <= > >=; p ==> q is implication.
Expressions: integer literals, parameters, + - * / % << >> & | ^, unary -,
a[i] (array element, or the heap cell at address a + i for a pointer) and len(a).
__out is the return value and may only appear in the postcondition."""

_SL_NOTES = """\
x |-> n asserts that address x is a live cell holding n; x |-> _ accepts any value;
x |-> v with a fresh name v binds the cell's value for use in later formulas
(values bound in the precondition are the entry values inside the postcondition).
p * q holds when p and q hold on disjoint sets of cells."""

_QUANTIFIER_NOTES = """\
Quantifiers range over a half-open interval: FORALL(lo, i, hi, body) binds i in [lo, hi)."""

INSTRUCTIONS = """\
You write code contracts for functions. Reply with exactly one fenced block:
```contract
requires: <precondition>
ensures: <postcondition>
```
The contract must be written in {logic} ({level}) using only the grammar below."""


def grammar_text(level: SpecLevel) -> str:
    """The grammar rows of every logic below or at ``level``, plus concrete syntax notes."""
    rows = [GRAMMAR_ROWS[lv] for lv in SpecLevel if level_leq(lv, level)]
    notes = [_SYNTAX_NOTES]
    if level_leq(SpecLevel.FOL, level):
        notes.append(_QUANTIFIER_NOTES)
    if level_leq(SpecLevel.PROP_SL, level):
        notes.append(_SL_NOTES)
    return "\n".join(rows) + "\n\n" + "\n".join(notes)


@dataclass(frozen=True)
class Feedback:
    """What went wrong with the previous candidate.

    ``kind`` is one of ``parse``, ``structural``, ``counterexample`` or ``timeout``.
    """

    kind: str
    summary: str
    violated: str = ""

    def render(self) -> str:
        title = {"parse": "parse error", "structural": "structural diagnostic",
                 "counterexample": "counterexample", "timeout": "no verdict"}[self.kind]
        body = self.summary
        if self.violated:
            body += f"\nviolated sub-formula: {self.violated}"
        return f"Feedback on the previous candidate ({title}):\n```\n{body}\n```"


@dataclass(frozen=True)
class PromptContext:
    function: str
    source: str
    doc: str
    target: SpecLevel
    grammar: str
    examples: tuple = ()            # (source, contract text) pairs
    feedback: Optional[Feedback] = None
    prior: str = ""
    attempt: int = 1
    params: tuple = field(default=(), compare=False)    # (name, type) pairs
    returns: str = ""

    def system_text(self) -> str:
        return INSTRUCTIONS.format(logic=LOGIC_NAMES[self.target], level=self.target.value)

    def user_text(self) -> str:
        parts = [f"Grammar ({self.target.value}):\n{self.grammar}"]
        for n, (src, contract) in enumerate(self.examples, 1):
            parts.append(f"Example {n}:\n```\n{src.strip()}\n```\n```contract\n{contract}\n```")
        fn_text = self.source.strip()
        if self.doc:
            fn_text = "\n".join(f"/// {line}" for line in self.doc.splitlines()) + "\n" + fn_text
        parts.append(f"Function:\n```\n{fn_text}\n```")
        if self.prior:
            parts.append(f"Previous candidate:\n```contract\n{self.prior}\n```")
        if self.feedback is not None:
            parts.append(self.feedback.render())
        parts.append("Write the contract for this function.")
        return "\n\n".join(parts)

    def messages(self) -> list:
        return [{"role": "system", "content": self.system_text()},
                {"role": "user", "content": self.user_text()}]

    def render(self) -> str:
        return self.system_text() + "\n\n" + self.user_text()


def build_prompt(artifact, target: SpecLevel, feedback: Optional[Feedback] = None,
                 prior: str = "", attempt: int = 1) -> PromptContext:
    """Assemble the prompt for ``artifact``. Unit tests are deliberately left out: they
    are reserved for validating the candidate."""
    fn = artifact.fn
    examples = tuple(examples_for(target, exclude=fn.name)[:MAX_EXAMPLES])
    return PromptContext(fn.name, fn.source, fn.doc, target, grammar_text(target), examples,
                         feedback, prior, attempt,
                         tuple((p.name, p.type) for p in fn.params), fn.ret)
