"""Generator backends: chat-completion client, uniform mock, record/replay."""
from .chat import ChatBackend, ChatConfig, HttpxTransport
from .mock import MockUniformBackend, mock_uniform_sample
from .prompts import (
    SYSTEM_PROMPT,
    build_system_prompt,
    build_user_prompt,
    krk_prompt,
    molecule_prompt,
    parse_candidate_list,
    render_list,
)
from .replay import RecordingTransport, RecordedSession, ReplayTransport

__all__ = [
    "ChatBackend",
    "ChatConfig",
    "HttpxTransport",
    "MockUniformBackend",
    "mock_uniform_sample",
    "SYSTEM_PROMPT",
    "build_system_prompt",
    "build_user_prompt",
    "krk_prompt",
    "molecule_prompt",
    "parse_candidate_list",
    "render_list",
    "RecordingTransport",
    "RecordedSession",
    "ReplayTransport",
]
