"""LLM gateway: prompts, response parsing, providers and deterministic mocks."""

from slicekit.llm.gateway import zero_shot_assign
from slicekit.llm.mock import MOCKS, MockProvider, make_mock
from slicekit.llm.parsing import (
    parse_assignment_response,
    parse_similarity_response,
    serialize_assignment,
)
from slicekit.llm.prompts import (
    SYSTEM_TEXT,
    PromptBundle,
    render_assignment_prompt,
    render_similarity_prompt,
)
from slicekit.llm.providers import (
    DEFAULT_API_KEY_ENV,
    ChatProvider,
    HttpChatProvider,
    ProviderConfig,
    RecordingProvider,
    ReplayProvider,
)

__all__ = [
    "DEFAULT_API_KEY_ENV",
    "MOCKS",
    "SYSTEM_TEXT",
    "ChatProvider",
    "HttpChatProvider",
    "MockProvider",
    "PromptBundle",
    "ProviderConfig",
    "RecordingProvider",
    "ReplayProvider",
    "make_mock",
    "parse_assignment_response",
    "parse_similarity_response",
    "render_assignment_prompt",
    "render_similarity_prompt",
    "serialize_assignment",
    "zero_shot_assign",
]
