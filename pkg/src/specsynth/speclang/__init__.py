"""The contract language: AST, parser/printer, levels and syntactic metrics."""

from .ast import (
    FALSE,
    RETURN_NAME,
    TRUE,
    WILDCARD,
    And,
    BinOp,
    Binder,
    Cmp,
    Const,
    Contract,
    Exists,
    Forall,
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
    SepExists,
    SepForall,
    Wildcard,
    subformula_at,
    subformulas,
)
from .levels import SpecLevel, level_join, level_leq, level_of
from .metrics import count_atoms, is_trivial, simplify, simplify_contract
from .syntax import (
    ParseError,
    ScopeError,
    parse_contract,
    parse_formula,
    print_contract,
    print_expr,
    print_formula,
)

__all__ = [name for name in dir() if not name.startswith("_")]
