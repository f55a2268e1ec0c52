"""The target language: parser, static checks and a tracing interpreter."""

from .ast import (
    ARRAY,
    BOOL,
    INT,
    PTR,
    VOID,
    FunctionDef,
    Param,
    Ref,
    UnitTest,
    iter_exprs,
    iter_stmts,
    stmt_exprs,
)
from .interp import (
    DEFAULT_STEP_LIMIT,
    FAULT_KINDS,
    ExecOutcome,
    HeapEvent,
    HeapState,
    TraceMismatch,
    execute,
    replay_trace,
    run_test,
)
from .parser import (
    ParseError,
    SourceError,
    TypeCheckError,
    parse_corpus_text,
    parse_entry,
    parse_function,
    split_entries,
)

__all__ = [name for name in dir() if not name.startswith("_")]
