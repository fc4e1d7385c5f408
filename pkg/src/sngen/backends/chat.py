"""Chat-completion generator backend."""
from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional

from ..exceptions import BackendError, CredentialsError, ParseFailure
from ..gen import GeneratorContext, PromptSpec
from .prompts import molecule_prompt, parse_candidate_list

log = logging.getLogger(__name__)


class TransportError(BackendError):
    def __init__(self, message, status: Optional[int] = None):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class ChatConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o"
    api_key_env: Optional[str] = "OPENAI_API_KEY"
    temperature: float = 0.7
    max_tokens_per_sample: int = 128
    retries: int = 2
    timeout: float = 120.0
    backoff: float = 1.0
    max_in_flight: int = 4

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens_per_sample < 1 or self.retries < 0:
            raise ValueError("max_tokens_per_sample must be >= 1 and retries >= 0")

    @property
    def endpoint(self) -> str:
        return self.base_url.rstrip("/") + "/chat/completions"


class HttpxTransport:
    """POST a JSON body and return the decoded JSON reply."""

    def __init__(self, client=None):
        import httpx

        self._httpx = httpx
        self._client = client or httpx.Client()

    def __call__(self, url: str, headers: dict, body: dict, timeout: float) -> dict:
        try:
            resp = self._client.post(url, headers=headers, json=body, timeout=timeout)
        except self._httpx.HTTPError as exc:
            raise TransportError(f"{type(exc).__name__}: {exc}") from exc
        if resp.status_code != 200:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}", resp.status_code)
        return resp.json()


Transport = Callable[[str, dict, dict, float], dict]


class ChatBackend:
    """Generator backend speaking the chat-completion wire format.

    Each draw is one request with ``max_tokens = max_tokens_per_sample * s``.
    Transport errors are retried ``config.retries`` times, then surfaced as
    :class:`BackendError`.  A reply without a bracketed list yields no
    candidates.  The API key is read from the environment variable named by
    ``config.api_key_env`` when the backend is built, so a missing key fails
    before any run starts.
    """

    def __init__(
        self,
        config: ChatConfig = ChatConfig(),
        transport: Optional[Transport] = None,
        prompt: Callable[[GeneratorContext, int], PromptSpec] = molecule_prompt,
        parser: Callable[[str], list] = parse_candidate_list,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.transport = transport if transport is not None else HttpxTransport()
        self.prompt = prompt
        self.parser = parser
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(config.max_in_flight)
        self._api_key = self._resolve_key()

    def _resolve_key(self) -> Optional[str]:
        env = self.config.api_key_env
        if env is None:
            return None
        key = os.environ.get(env)
        if not key:
            raise CredentialsError(f"environment variable {env} is not set")
        return key

    def request_body(self, context: GeneratorContext, s: int) -> dict:
        spec = self.prompt(context, s)
        return {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens_per_sample * s,
            "messages": [
                {"role": "system", "content": spec.system},
                {"role": "user", "content": spec.user},
            ],
        }

    def _post(self, body: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        attempts = self.config.retries + 1
        for attempt in range(1, attempts + 1):
            try:
                with self._slots:
                    return self.transport(self.config.endpoint, headers, body, self.config.timeout)
            except TransportError as exc:
                if attempt == attempts:
                    raise
                log.warning("chat request failed (attempt %d/%d): %s", attempt, attempts, exc)
                self._sleep(self.config.backoff * attempt)
        raise AssertionError("unreachable")  # pragma: no cover

    def sample(self, context: GeneratorContext, count: int, seed: int = 0) -> list[str]:
        reply = self._post(self.request_body(context, count))
        try:
            text = reply["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed chat-completion reply: {exc}") from exc
        try:
            items = self.parser(text)
        except ParseFailure as exc:
            log.warning("no candidate list in reply: %s", exc)
            return []
        return list(items)[:count]
