"""Prompt assembly and candidate contract generators."""

from .enumerative import (
    DEFAULT_MAX_ATOMS,
    Enumerator,
    ExhaustedError,
    Signature,
    enumerate_candidates,
    enumeration_bound,
)
from .fewshot import BANK, examples_for
from .generators import (
    API_KEY_ENV,
    DEFAULT_TOKEN_CAP,
    Enumerative,
    GenerationResult,
    GeneratorError,
    RemoteChat,
    RemoteConfig,
    ScriptedMock,
    count_tokens,
    extract_contract,
    remote_generate,
)
from .prompt import GRAMMAR_ROWS, MAX_EXAMPLES, Feedback, PromptContext, build_prompt, grammar_text

__all__ = [name for name in dir() if not name.startswith("_")]
