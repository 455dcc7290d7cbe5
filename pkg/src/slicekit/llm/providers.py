"""Chat-completion providers: an HTTP client and a transcript replayer."""

from __future__ import annotations

import json
import os
import threading
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Protocol

import httpx

from slicekit.errors import ConfigInvalid, GatewayError

DEFAULT_API_KEY_ENV = "SLICEKIT_API_KEY"


class ChatProvider(Protocol):
    def chat(self, system: str, user: str, temperature: float) -> str: ...


@dataclass(frozen=True)
class ProviderConfig:
    endpoint_url: str = "http://localhost:8000/v1/chat/completions"
    model_name: str = "default"
    api_key_env: str = DEFAULT_API_KEY_ENV
    temperature: float = 0.8
    max_retries: int = 2
    request_timeout_ms: int = 60_000
    parallelism: int = 4

    def __post_init__(self) -> None:
        if not 0 <= self.temperature <= 2:
            raise ConfigInvalid(f"temperature {self.temperature} outside [0, 2]")
        if self.max_retries < 0:
            raise ConfigInvalid("max_retries must be >= 0")
        if self.request_timeout_ms <= 0:
            raise ConfigInvalid("request_timeout_ms must be positive")
        if self.parallelism < 1:
            raise ConfigInvalid("parallelism must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ProviderConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        try:
            return cls(**known)
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from exc


def require_api_key(env_var: str) -> str:
    key = os.environ.get(env_var)
    if not key:
        raise ConfigInvalid(f"API key environment variable {env_var} is not set")
    return key


class HttpChatProvider:
    """OpenAI-style chat-completion endpoint.

    The API key is read from the environment variable named in the config
    when the provider is created; transport failures are retried
    ``max_retries`` times before :class:`GatewayError` is raised.
    """

    def __init__(self, config: ProviderConfig, client: httpx.Client | None = None) -> None:
        self.config = config
        self._key = require_api_key(config.api_key_env)
        self._client = client or httpx.Client(timeout=config.request_timeout_ms / 1000)

    def payload(self, system: str, user: str, temperature: float) -> dict[str, Any]:
        return {
            "model": self.config.model_name,
            "temperature": temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        }

    def chat(self, system: str, user: str, temperature: float) -> str:
        body = self.payload(system, user, temperature)
        headers = {"Authorization": f"Bearer {self._key}"}
        last: Exception | None = None
        for _ in range(self.config.max_retries + 1):
            try:
                resp = self._client.post(self.config.endpoint_url, json=body, headers=headers)
                resp.raise_for_status()
                content = resp.json()["choices"][0]["message"]["content"]
                if not isinstance(content, str):
                    raise TypeError("message content is not a string")
                return content
            except (httpx.HTTPError, ValueError, KeyError, IndexError, TypeError) as exc:
                last = exc
        raise GatewayError(f"chat completion failed after {self.config.max_retries + 1} attempts: {last}")


class ReplayProvider:
    """Replays recorded responses in order, for golden tests.

    A transcript is a list of ``{"system", "user", "response"}`` records. With
    ``strict`` the incoming prompt must equal the recorded one.
    """

    def __init__(self, transcript: list[dict[str, str]], strict: bool = False) -> None:
        self._records = list(transcript)
        self._pos = 0
        self._lock = threading.Lock()
        self.strict = strict

    @classmethod
    def from_file(cls, path: str | Path, strict: bool = False) -> "ReplayProvider":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")), strict)

    def chat(self, system: str, user: str, temperature: float) -> str:
        with self._lock:
            if self._pos >= len(self._records):
                raise GatewayError("transcript exhausted")
            record = self._records[self._pos]
            self._pos += 1
        if self.strict and (record.get("system") != system or record.get("user") != user):
            raise GatewayError(f"prompt {self._pos} does not match the transcript")
        return record["response"]


class RecordingProvider:
    """Wraps a provider and keeps a transcript that :class:`ReplayProvider` can replay."""

    def __init__(self, inner: ChatProvider) -> None:
        self.inner = inner
        self.transcript: list[dict[str, str]] = []
        self._lock = threading.Lock()

    def chat(self, system: str, user: str, temperature: float) -> str:
        response = self.inner.chat(system, user, temperature)
        with self._lock:
            self.transcript.append({"system": system, "user": user, "response": response})
        return response
