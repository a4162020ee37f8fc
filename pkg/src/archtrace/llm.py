"""Provider-agnostic chat/embedding access with record and replay cassettes.

A cassette is a JSON document ``{"version": 1, "entries": [...]}`` where each
entry stores a request, its canonical hash key and the response. Replay mode
answers purely from the cassette and never opens a network connection.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import math
import os
import threading
import urllib.error
import urllib.request
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .errors import CassetteMissError, FormatError, GatewayError

logger = logging.getLogger(__name__)

CASSETTE_VERSION = 1
DEFAULT_SEED = 0
DEFAULT_MODEL = "gpt-4o"
OFFLINE_EMBEDDING_MODEL = "offline"
OFFLINE_EMBEDDING_DIM = 256
API_KEY_ENV = "ARCHTRACE_API_KEY"


class Mode(str, enum.Enum):
    LIVE = "live"
    RECORD = "record"
    REPLAY = "replay"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"unknown chat role {self.role!r}")
        if self.content is None:
            raise ValueError("message content must not be None")


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple(self.messages))
        if not self.messages:
            raise ValueError("a chat request needs at least one message")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")

    def to_dict(self) -> dict:
        return {
            "type": "chat",
            "model": self.model,
            "temperature": float(self.temperature),
            "seed": self.seed,
            "messages": [asdict(m) for m in self.messages],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ChatRequest":
        return cls(
            model=data["model"],
            messages=tuple(ChatMessage(m["role"], m["content"]) for m in data["messages"]),
            temperature=data.get("temperature", 0.0),
            seed=data.get("seed", DEFAULT_SEED),
        )

    def describe(self) -> str:
        last = self.messages[-1].content.strip().replace("\n", " ")
        return last if len(last) <= 80 else last[:77] + "..."


@dataclass(frozen=True)
class EmbeddingRequest:
    model: str
    texts: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "texts", tuple(self.texts))
        if not self.texts:
            raise ValueError("an embedding request needs at least one text")

    def to_dict(self) -> dict:
        return {"type": "embedding", "model": self.model, "texts": list(self.texts)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "EmbeddingRequest":
        return cls(data["model"], tuple(data["texts"]))

    def describe(self) -> str:
        return f"embedding of {len(self.texts)} text(s) starting {self.texts[0][:40]!r}"


def request_from_dict(data: Mapping):
    if data.get("type") == "embedding":
        return EmbeddingRequest.from_dict(data)
    return ChatRequest.from_dict(data)


def canonical_key(request) -> str:
    """SHA-256 over the request's canonical JSON (sorted keys, no whitespace)."""
    payload = json.dumps(request.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class CassetteEntry:
    key: str
    request: object
    response: object

    def __post_init__(self):
        if self.key != canonical_key(self.request):
            raise FormatError(f"cassette entry key {self.key[:12]}... does not match its request")

    def to_dict(self) -> dict:
        return {"key": self.key, "request": self.request.to_dict(), "response": self.response}


class Cassette:
    """Recorded request/response pairs; appends are serialized by a lock."""

    def __init__(self, path=None, entries=()):
        self.path = Path(path) if path is not None else None
        self._entries: dict[str, CassetteEntry] = {}
        self._lock = threading.Lock()
        for entry in entries:
            self._entries.setdefault(entry.key, entry)

    @classmethod
    def load(cls, path, missing_ok: bool = False) -> "Cassette":
        path = Path(path)
        if not path.exists():
            if missing_ok:
                return cls(path)
            raise FileNotFoundError(f"cassette not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid cassette JSON ({exc})") from exc
        version = data.get("version") if isinstance(data, dict) else None
        if version != CASSETTE_VERSION:
            raise FormatError(f"{path}: unsupported cassette version {version!r}")
        entries = [
            CassetteEntry(e["key"], request_from_dict(e["request"]), e["response"])
            for e in data.get("entries", [])
        ]
        return cls(path, entries)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, request):
        return canonical_key(request) in self._entries

    def entries(self) -> list[CassetteEntry]:
        return list(self._entries.values())

    def lookup(self, request):
        entry = self._entries.get(canonical_key(request))
        if entry is None:
            raise CassetteMissError(f"no recorded response for request: {request.describe()}")
        return entry.response

    def record(self, request, response) -> None:
        with self._lock:
            key = canonical_key(request)
            self._entries[key] = CassetteEntry(key, request, response)
            if self.path is not None:
                self._save_locked()

    def save(self, path=None) -> None:
        with self._lock:
            if path is not None:
                self.path = Path(path)
            self._save_locked()

    def _save_locked(self):
        if self.path is None:
            raise ValueError("cassette has no path")
        data = {"version": CASSETTE_VERSION, "entries": [e.to_dict() for e in self._entries.values()]}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


# -- providers ---------------------------------------------------------------


class OpenAICompatibleProvider:
    """Minimal client for ``/chat/completions`` and ``/embeddings`` endpoints."""

    def __init__(self, base_url="https://api.openai.com/v1", api_key=None, timeout=120.0):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.timeout = timeout

    def _post(self, endpoint, payload):
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(
            f"{self.base_url}/{endpoint}",
            data=json.dumps(payload).encode("utf-8"),
            headers=headers,
            method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            raise GatewayError(f"provider returned HTTP {exc.code} for {endpoint}") from exc
        except (urllib.error.URLError, OSError, json.JSONDecodeError) as exc:
            raise GatewayError(f"provider request to {endpoint} failed: {exc}") from exc

    def chat(self, request: ChatRequest) -> str:
        body = self._post("chat/completions", {
            "model": request.model,
            "temperature": request.temperature,
            "seed": request.seed,
            "messages": [asdict(m) for m in request.messages],
        })
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise GatewayError("provider response has no message content") from exc

    def embed(self, request: EmbeddingRequest) -> list[list[float]]:
        body = self._post("embeddings", {"model": request.model, "input": list(request.texts)})
        try:
            data = sorted(body["data"], key=lambda d: d["index"])
            return [list(map(float, d["embedding"])) for d in data]
        except (KeyError, TypeError) as exc:
            raise GatewayError("provider response has no embeddings") from exc


class ScriptedProvider:
    """Answers chat requests from a callable or a prompt-substring table.

    Useful for producing cassettes for fixtures and for unit tests.
    """

    def __init__(self, script: Callable[[ChatRequest], str] | Mapping[str, str]):
        self.script = script
        self.calls: list[ChatRequest] = []

    def chat(self, request: ChatRequest) -> str:
        self.calls.append(request)
        if callable(self.script):
            return self.script(request)
        last = request.messages[-1].content
        for marker, response in self.script.items():
            if marker in last:
                return response
        raise GatewayError(f"scripted provider has no answer for: {request.describe()}")

    def embed(self, request: EmbeddingRequest) -> list[list[float]]:
        return [offline_embedding(t) for t in request.texts]


def offline_embedding(text: str, dim: int = OFFLINE_EMBEDDING_DIM) -> list[float]:
    """Hashed character-trigram counts, L2-normalized.

    The text is padded with two spaces on each side so every input, even the
    empty string, yields at least one trigram.
    """
    padded = f"  {text}  "
    counts = [0.0] * dim
    for i in range(len(padded) - 2):
        digest = hashlib.blake2b(padded[i:i + 3].encode("utf-8"), digest_size=8).digest()
        counts[int.from_bytes(digest, "big") % dim] += 1.0
    norm = math.sqrt(math.fsum(c * c for c in counts))
    return [c / norm for c in counts]


# -- gateway -----------------------------------------------------------------


@dataclass
class LLMGateway:
    mode: Mode = Mode.REPLAY
    cassette: Cassette | None = None
    provider: object | None = None
    model: str = DEFAULT_MODEL
    embedding_model: str = OFFLINE_EMBEDDING_MODEL
    temperature: float = 0.0
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        self.mode = Mode(self.mode)

    def __deepcopy__(self, memo):
        # a gateway is a shared handle (cassette, connection settings), never duplicated
        return self

    def request(self, messages: Sequence[ChatMessage]) -> ChatRequest:
        return ChatRequest(self.model, tuple(messages), self.temperature, self.seed)

    def _dispatch(self, request, mode, live_call):
        mode = Mode(mode or self.mode)
        if mode is Mode.REPLAY:
            if self.cassette is None:
                raise GatewayError("replay mode requires a loaded cassette")
            return self.cassette.lookup(request)
        if self.provider is None:
            raise GatewayError(f"{mode.value} mode requires a provider")
        response = live_call(request)
        if mode is Mode.RECORD:
            if self.cassette is None:
                raise GatewayError("record mode requires a cassette")
            self.cassette.record(request, response)
        return response

    def chat(self, request: ChatRequest, mode: Mode | str | None = None) -> str:
        response = self._dispatch(request, mode, lambda r: self.provider.chat(r))
        logger.debug("chat %s -> %d chars", request.describe(), len(response))
        return response

    def complete(self, messages: Sequence[ChatMessage], mode=None) -> str:
        return self.chat(self.request(messages), mode)

    def embed(self, texts: Sequence[str], mode: Mode | str | None = None) -> list[list[float]]:
        texts = list(texts)
        if not texts:
            raise ValueError("embed() needs at least one text")
        if self.embedding_model == OFFLINE_EMBEDDING_MODEL:
            return [offline_embedding(t) for t in texts]
        request = EmbeddingRequest(self.embedding_model, tuple(texts))
        vectors = self._dispatch(request, mode, lambda r: self.provider.embed(r))
        if len(vectors) != len(texts):
            raise GatewayError(f"expected {len(texts)} embeddings, got {len(vectors)}")
        return vectors
