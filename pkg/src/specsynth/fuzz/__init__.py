"""Fuzz harnesses and the coverage-guided contract stress loop."""

from .harness import (
    ALIAS_TAG,
    NULL_TAG,
    DecodedInput,
    Harness,
    HarnessError,
    ParamRule,
    build_harness,
    decode_input,
    encode_input,
    input_json,
)
from .loop import (
    COUNTEREXAMPLE_SCHEMA,
    MAX_INPUT_BYTES,
    MUTATIONS,
    Counterexample,
    FuzzConfig,
    FuzzResult,
    ReplayResult,
    Status,
    UnitStageResult,
    fuzz_contract,
    minimize,
    mutate,
    outcome_digest,
    replay_counterexample,
    run_unit_stage,
)

__all__ = [name for name in dir() if not name.startswith("_")]
