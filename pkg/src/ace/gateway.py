"""Provider-agnostic chat-completion gateway with record/replay fixtures.

Three modes:

* ``live``   — forward the request to the configured provider.
* ``record`` — forward, then write a ``<digest>.fixture.json`` file.
* ``replay`` — answer from the fixture store without touching the network.

The fixture key is a SHA-256 digest over a canonical serialization of the
request: the temperature formatted with exactly three decimal places,
followed by each message as ``role + US + content + RS`` (US = U+001F,
RS = U+001E), UTF-8 encoded. ``label`` and ``max_tokens`` are deliberately
left out of the digest so renaming a pipeline stage or tuning token limits
does not invalidate recorded fixtures.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import httpx

from .errors import ConfigError, ProviderError, ReplayMiss
from .ids import SystemClock

ROLES = ("system", "user", "assistant")

_UNIT_SEP = "\x1f"
_RECORD_SEP = "\x1e"

DEFAULT_FIXTURES_DIR = "./fixtures"

#: Default sampling temperatures per stage family. Analysis and generator
#: stages must be stable; only live conversation turns are allowed to vary.
GENERATOR_TEMPERATURE = 0.0
CONVERSATION_TEMPERATURE = 0.7


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"invalid role {self.role!r}, expected one of {ROLES}")
        if self.content == "" and self.role != "assistant":
            raise ValueError("only assistant messages may be empty placeholders")


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[ChatMessage, ...]
    temperature: float = GENERATOR_TEMPERATURE
    max_tokens: int = 1024
    label: str = ""

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if not (0.0 <= self.temperature <= 2.0):
            raise ValueError("temperature must be within [0, 2]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        roles = [m.role for m in self.messages]
        if "system" in roles and "assistant" in roles:
            if roles.index("system") > roles.index("assistant"):
                raise ValueError("system message must precede assistant messages")


def request(messages, temperature=GENERATOR_TEMPERATURE, max_tokens=1024, label="") -> CompletionRequest:
    """Build a CompletionRequest from (role, content) pairs or ChatMessages."""
    msgs = tuple(
        m if isinstance(m, ChatMessage) else ChatMessage(role=m[0], content=m[1])
        for m in messages
    )
    return CompletionRequest(messages=msgs, temperature=temperature, max_tokens=max_tokens, label=label)


def canonical_key(req: CompletionRequest) -> str:
    """64-hex SHA-256 digest of the canonicalized request.

    Stable across runs and across serialization field order; excludes
    ``label`` and ``max_tokens``.
    """
    parts = [f"{req.temperature:.3f}"]
    for m in req.messages:
        parts.append(m.role + _UNIT_SEP + m.content + _RECORD_SEP)
    blob = "".join(parts).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def canonical_request_document(req: CompletionRequest) -> dict:
    """The canonical form persisted inside fixture files (digest inputs only)."""
    return {
        "temperature": round(req.temperature, 3),
        "messages": [{"role": m.role, "content": m.content} for m in req.messages],
    }


def request_from_document(doc: dict) -> CompletionRequest:
    return request(
        [(m["role"], m["content"]) for m in doc["messages"]],
        temperature=float(doc["temperature"]),
    )


class FixtureStore:
    """Directory of one ``<digest>.fixture.json`` file per recorded reply.

    Reads are lock-free; writes go through a temp file and ``os.replace`` so
    concurrent recorders never expose a torn file.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path_for(self, digest: str) -> Path:
        return self.root / f"{digest}.fixture.json"

    def get(self, digest: str) -> Optional[str]:
        path = self.path_for(digest)
        if not path.exists():
            return None
        doc = json.loads(path.read_text(encoding="utf-8"))
        return doc["reply"]

    def put(self, digest: str, req: CompletionRequest, reply: str, recorded_at: str) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        doc = {
            "request": canonical_request_document(req),
            "reply": reply,
            "recorded_at": recorded_at,
        }
        data = json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(data)
            os.replace(tmp, self.path_for(digest))
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
        return self.path_for(digest)

    def digests(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(p.name.split(".")[0] for p in self.root.glob("*.fixture.json"))


class LLMGateway:
    """Chat-completion client that is deterministic under replay.

    In replay mode ``complete()`` is a pure function of the request for a
    fixed fixture store. Safe for concurrent use: replies are read-only and
    record-mode fixture writes are atomic per key.
    """

    def __init__(
        self,
        mode: str = "replay",
        fixtures_dir: str | Path = DEFAULT_FIXTURES_DIR,
        base_url: str = "",
        api_key: str = "",
        model: str = "",
        transport: httpx.BaseTransport | None = None,
        clock=None,
        timeout: float = 60.0,
    ):
        if mode not in ("live", "record", "replay"):
            raise ConfigError(f"invalid gateway mode {mode!r}")
        self.mode = mode
        self.fixtures = FixtureStore(fixtures_dir)
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.model = model
        self.clock = clock or SystemClock()
        self._transport = transport
        self._timeout = timeout
        self.calls = 0  # total complete() invocations, for repair-budget tests

    @classmethod
    def from_env(cls, env=os.environ, transport=None, clock=None) -> "LLMGateway":
        return cls(
            mode=env.get("ACE_LLM_MODE", "replay"),
            fixtures_dir=env.get("ACE_FIXTURES_DIR", DEFAULT_FIXTURES_DIR),
            base_url=env.get("ACE_LLM_BASE_URL", ""),
            api_key=env.get("ACE_LLM_API_KEY", ""),
            model=env.get("ACE_LLM_MODEL", ""),
            transport=transport,
            clock=clock,
        )

    def complete(self, req: CompletionRequest) -> str:
        self.calls += 1
        digest = canonical_key(req)
        if self.mode == "replay":
            reply = self.fixtures.get(digest)
            if reply is None:
                raise ReplayMiss(digest)
            return reply

        reply = self._forward(req)
        if self.mode == "record":
            self.fixtures.put(digest, req, reply, recorded_at=self.clock.now())
        return reply

    # -- provider transport ------------------------------------------------

    def _forward(self, req: CompletionRequest) -> str:
        if not self.base_url or not self.api_key:
            raise ConfigError(
                f"mode {self.mode!r} needs ACE_LLM_BASE_URL and ACE_LLM_API_KEY"
            )
        payload = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in req.messages],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        try:
            with httpx.Client(transport=self._transport, timeout=self._timeout) as client:
                resp = client.post(
                    f"{self.base_url}/chat/completions",
                    json=payload,
                    headers={"Authorization": f"Bearer {self.api_key}"},
                )
        except httpx.HTTPError as exc:
            raise ProviderError(f"transport failure: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderError(
                f"provider returned HTTP {resp.status_code}", status=resp.status_code
            )
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc
