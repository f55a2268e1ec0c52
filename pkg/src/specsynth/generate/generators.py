"""Candidate generators: a scripted mock, the enumerator and a remote chat client.

All generators take a :class:`PromptContext` and return a
:class:`GenerationResult` or raise :class:`GeneratorError`.

The remote wire format is a generic chat-completion exchange::

    POST <url>
    Authorization: Bearer $SPECSYNTH_API_KEY
    {"model": ..., "messages": [{"role": "system", ...}, {"role": "user", ...}],
     "temperature": 0, "max_tokens": <cap>}

    200 {"choices": [{"message": {"content": "...```contract\\n...\\n```..."}}],
         "usage": {"prompt_tokens": n, "completion_tokens": m}}
"""

from __future__ import annotations

import json
import os
import re
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Optional

from .enumerative import DEFAULT_MAX_ATOMS, Enumerator, ExhaustedError, Signature
from .prompt import PromptContext

DEFAULT_TOKEN_CAP = 400
API_KEY_ENV = "SPECSYNTH_API_KEY"

_FENCE = re.compile(r"```[ \t]*([A-Za-z0-9_-]*)[ \t]*\r?\n(.*?)```", re.S)


class GeneratorError(Exception):
    """A generator could not produce a candidate. ``kind`` is ``transport``,
    ``no-contract``, ``exhausted`` or ``config``."""

    def __init__(self, kind: str, message: str, status: Optional[int] = None):
        super().__init__(message)
        self.kind = kind
        self.status = status


@dataclass(frozen=True)
class GenerationResult:
    text: str
    tokens_in: int
    tokens_out: int
    latency: float = 0.0


def count_tokens(text: str) -> int:
    """Whitespace-separated token count, used where no model tokenizer is available."""
    return len(text.split())


def _truncate(text: str, cap: int) -> str:
    """The prefix of ``text`` holding at most ``cap`` whitespace tokens."""
    matches = list(re.finditer(r"\S+", text))
    if len(matches) <= cap:
        return text
    return text[:matches[cap - 1].end()] if cap else ""


def extract_contract(reply: str) -> Optional[str]:
    """The body of the first fenced block (preferring one tagged ``contract``)."""
    blocks = _FENCE.findall(reply)
    for tag, body in blocks:
        if tag == "contract":
            return body.strip()
    for _, body in blocks:
        if "requires" in body or "ensures" in body:
            return body.strip()
    return None


class ScriptedMock:
    """Replays a fixed list of replies, one per call; raises once they run out.

    A reply holding a fenced contract block yields that block, as a model reply
    would; any other reply is the candidate verbatim."""

    def __init__(self, replies, cap: int = DEFAULT_TOKEN_CAP):
        self.replies = list(replies)
        self.cap = cap
        self.calls = 0
        self.prompts = []

    def generate(self, ctx: PromptContext) -> GenerationResult:
        self.prompts.append(ctx)
        if self.calls >= len(self.replies):
            raise GeneratorError("exhausted", f"script has only {len(self.replies)} replies")
        reply = _truncate(self.replies[self.calls], self.cap)
        self.calls += 1
        text = extract_contract(reply)
        return GenerationResult(reply if text is None else text, count_tokens(ctx.render()),
                                count_tokens(reply))

    @classmethod
    def from_file(cls, path, cap: int = DEFAULT_TOKEN_CAP) -> "ScriptedMock":
        """A script file is a JSON list of reply strings, or plain text with replies
        separated by lines holding only ``---``."""
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        if text.lstrip().startswith("["):
            replies = json.loads(text)
        else:
            replies = [r.strip("\n") for r in re.split(r"^---[ \t]*$", text, flags=re.M)]
        return cls(replies, cap)


class Enumerative:
    """Returns the ``ctx.attempt``-th candidate of the enumeration for the function's
    signature and target level."""

    def __init__(self, max_atoms: int = DEFAULT_MAX_ATOMS, cap: int = DEFAULT_TOKEN_CAP):
        self.max_atoms = max_atoms
        self.cap = cap
        self._enumerators = {}

    def enumerator(self, ctx: PromptContext) -> Enumerator:
        sig = Signature(tuple(ctx.params), ctx.returns)
        key = (sig, ctx.target)
        if key not in self._enumerators:
            self._enumerators[key] = Enumerator(sig, ctx.target, self.max_atoms)
        return self._enumerators[key]

    def generate(self, ctx: PromptContext) -> GenerationResult:
        start = time.monotonic()
        try:
            text = self.enumerator(ctx).text(ctx.attempt)
        except ExhaustedError as e:
            raise GeneratorError("exhausted", str(e)) from e
        text = _truncate(text, self.cap)
        return GenerationResult(text, 0, count_tokens(text), time.monotonic() - start)


@dataclass(frozen=True)
class RemoteConfig:
    url: str
    model: str
    cap: int = DEFAULT_TOKEN_CAP
    timeout: float = 60.0
    api_key: Optional[str] = None

    @classmethod
    def load(cls, path) -> "RemoteConfig":
        """Read ``{"url", "model", "cap", "timeout"}`` from a JSON file; the credential
        comes from the environment."""
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
        try:
            return cls(d["url"], d["model"], int(d.get("cap", DEFAULT_TOKEN_CAP)),
                       float(d.get("timeout", 60.0)), os.environ.get(API_KEY_ENV))
        except KeyError as e:
            raise GeneratorError("config", f"remote config lacks {e.args[0]!r}") from e


def remote_generate(ctx: PromptContext, cfg: RemoteConfig) -> GenerationResult:
    """One greedy chat-completion request; the reply's first fenced block is the candidate."""
    body = json.dumps({"model": cfg.model, "messages": ctx.messages(), "temperature": 0,
                       "max_tokens": cfg.cap}).encode()
    headers = {"Content-Type": "application/json"}
    if cfg.api_key:
        headers["Authorization"] = f"Bearer {cfg.api_key}"
    request = urllib.request.Request(cfg.url, data=body, headers=headers, method="POST")
    start = time.monotonic()
    try:
        with urllib.request.urlopen(request, timeout=cfg.timeout) as response:
            payload = json.loads(response.read().decode("utf-8"))
    except urllib.error.HTTPError as e:
        raise GeneratorError("transport", f"endpoint answered {e.code}", e.code) from e
    except (urllib.error.URLError, OSError, ValueError) as e:
        raise GeneratorError("transport", f"request failed: {e}") from e
    latency = time.monotonic() - start
    try:
        reply = payload["choices"][0]["message"]["content"] or ""
    except (KeyError, IndexError, TypeError) as e:
        raise GeneratorError("transport", "malformed chat-completion response") from e
    text = extract_contract(reply)
    if text is None:
        raise GeneratorError("no-contract", "reply contains no fenced contract block")
    usage = payload.get("usage") or {}
    tokens_in = usage.get("prompt_tokens", count_tokens(ctx.render()))
    tokens_out = min(usage.get("completion_tokens", count_tokens(reply)), cfg.cap)
    return GenerationResult(text, tokens_in, tokens_out, latency)


class RemoteChat:
    def __init__(self, cfg: RemoteConfig):
        self.cfg = cfg

    def generate(self, ctx: PromptContext) -> GenerationResult:
        return remote_generate(ctx, self.cfg)
