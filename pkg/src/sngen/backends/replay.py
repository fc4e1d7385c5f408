"""Record and replay chat-completion transports for deterministic tests."""
from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..exceptions import ReplayMismatch
from .chat import TransportError


def request_digest(url: str, body: dict) -> str:
    raw = json.dumps({"url": url, "body": body}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(raw.encode()).hexdigest()


@dataclass
class RecordedSession:
    """Ordered ``(digest, response)`` pairs.

    A response is either a decoded JSON reply or ``{"status": <int>, "error": ...}``
    for a recorded transport failure.
    """

    interactions: list = field(default_factory=list)

    def save(self, path) -> None:
        data = {"version": 1, "interactions": [{"digest": d, "response": r} for d, r in self.interactions]}
        Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "RecordedSession":
        data = json.loads(Path(path).read_text())
        return cls([(item["digest"], item["response"]) for item in data["interactions"]])


class RecordingTransport:
    def __init__(self, inner, session: RecordedSession | None = None):
        self.inner = inner
        self.session = session if session is not None else RecordedSession()
        self._lock = threading.Lock()

    def __call__(self, url, headers, body, timeout):
        digest = request_digest(url, body)
        try:
            reply = self.inner(url, headers, body, timeout)
        except TransportError as exc:
            with self._lock:
                self.session.interactions.append((digest, {"status": exc.status, "error": str(exc)}))
            raise
        with self._lock:
            self.session.interactions.append((digest, reply))
        return reply


class ReplayTransport:
    """Serve recorded replies; each request must match the next recorded digest."""

    def __init__(self, session: RecordedSession):
        self.session = session
        self.position = 0
        self._lock = threading.Lock()

    def __call__(self, url, headers, body, timeout):
        digest = request_digest(url, body)
        with self._lock:
            if self.position >= len(self.session.interactions):
                raise ReplayMismatch(f"session exhausted after {self.position} requests")
            expected, reply = self.session.interactions[self.position]
            if digest != expected:
                raise ReplayMismatch(f"request {self.position} does not match the recording")
            self.position += 1
        if isinstance(reply, dict) and "status" in reply and "choices" not in reply:
            raise TransportError(reply.get("error", "recorded failure"), reply.get("status"))
        return reply
