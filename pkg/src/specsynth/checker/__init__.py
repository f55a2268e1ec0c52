"""Runtime checking of formulas and contracts against concrete executions."""

from .contracts import (
    ENSURES,
    EXECUTION,
    FAULT_INSIDE_PRECONDITION,
    REQUIRES,
    ContractVerdict,
    Outcome,
    arg_bindings,
    check_contract,
)
from .oracle import MAX_ORACLE_CELLS, OracleTooLarge, oracle_eval_split
from .semantics import (
    MAX_ALTERNATIVES,
    MAX_QUANTIFIER_RANGE,
    Blame,
    EvalEnv,
    EvalError,
    Verdict,
    compile_formula,
    eval_formula,
    exported_binders,
)

__all__ = [
    "ENSURES", "EXECUTION", "FAULT_INSIDE_PRECONDITION", "REQUIRES", "ContractVerdict",
    "Outcome", "arg_bindings", "check_contract", "MAX_ORACLE_CELLS", "OracleTooLarge",
    "oracle_eval_split", "MAX_ALTERNATIVES", "MAX_QUANTIFIER_RANGE", "Blame", "EvalEnv",
    "EvalError", "Verdict", "compile_formula", "eval_formula", "exported_binders",
]
