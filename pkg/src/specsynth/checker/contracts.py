"""Checking a contract against one recorded execution."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from ..minilang.interp import ExecOutcome
from ..speclang.ast import RETURN_NAME, Contract
from .semantics import Blame, EvalEnv, EvalError, Verdict, eval_formula, make_blame

REQUIRES, ENSURES, EXECUTION = "requires", "ensures", "execution"
FAULT_INSIDE_PRECONDITION = "faulting execution inside precondition"


class Outcome(str, enum.Enum):
    PASS = "PASS"
    PRE_FAILED = "PRE_FAILED"
    POST_VIOLATED = "POST_VIOLATED"
    EVAL_ERROR = "EVAL_ERROR"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ContractVerdict:
    outcome: Outcome
    side: str = ""
    detail: str = ""
    blame: Optional[Blame] = None
    requires: Optional[Verdict] = None
    ensures: Optional[Verdict] = None

    @property
    def passed(self) -> bool:
        return self.outcome is Outcome.PASS


def arg_bindings(outcome: ExecOutcome, names=None) -> dict:
    names = outcome.param_names if names is None else names
    if len(names) != len(outcome.args):
        raise ValueError("parameter names do not match the recorded arguments")
    return dict(zip(names, outcome.args))


def _eval_side(f, env, side):
    try:
        return eval_formula(f, env, side), None
    except EvalError as e:
        blame = make_blame(f, e.node, e.message, side)
        blame = Blame(side, blame.path, blame.text, "eval-error", e.message)
        return None, ContractVerdict(Outcome.EVAL_ERROR, side, e.message, blame)


def check_contract(contract: Contract, outcome: ExecOutcome, names=None) -> ContractVerdict:
    """Judge ``contract`` on ``outcome``.

    ``requires`` is read on the pre-state with the arguments bound; ``ensures``
    on the post-state with the arguments, ``__out`` (for non-void functions) and
    the binder values established by ``requires``. A run that faults although
    its precondition held violates the contract.
    """
    args = arg_bindings(outcome, names)
    pre, error = _eval_side(contract.requires, EvalEnv(args, outcome.pre_state), REQUIRES)
    if error is not None:
        return error
    if not pre.holds:
        return ContractVerdict(Outcome.PRE_FAILED, REQUIRES, pre.detail, pre.blame, pre)
    if not outcome.ok:
        detail = f"{FAULT_INSIDE_PRECONDITION}: {outcome.fault}"
        if outcome.fault_detail:
            detail += f" ({outcome.fault_detail})"
        blame = Blame(EXECUTION, (), outcome.fault, "fault", detail)
        return ContractVerdict(Outcome.POST_VIOLATED, EXECUTION, detail, blame, pre)
    post_bindings = dict(args)
    post_bindings.update(pre.bindings)
    if outcome.ret is not None:
        post_bindings[RETURN_NAME] = outcome.ret
    post, error = _eval_side(contract.ensures, EvalEnv(post_bindings, outcome.post_state),
                             ENSURES)
    if error is not None:
        return error
    if not post.holds:
        return ContractVerdict(Outcome.POST_VIOLATED, ENSURES, post.detail, post.blame,
                               pre, post)
    return ContractVerdict(Outcome.PASS, requires=pre, ensures=post)
