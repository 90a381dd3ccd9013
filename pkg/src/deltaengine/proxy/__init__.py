from .base import NeuralProxy, ProxyConfig, ProxyError
from .http import ChatClient, HttpChatProxy
from .prompts import (
    DELTA_TEMPLATE_VERSION,
    ENTRY_TEMPLATE_VERSION,
    EmptyResponseError,
    PromptBundle,
    build_delta_prompt,
    build_entry_prompt,
    extract_delta,
    parse_entry_response,
)
from .scripted import NON_EXECUTABLE_TEXT, ScriptedProxy

__all__ = [
    "NeuralProxy", "ProxyConfig", "ProxyError", "ChatClient", "HttpChatProxy",
    "PromptBundle", "EmptyResponseError", "build_entry_prompt",
    "build_delta_prompt", "extract_delta", "parse_entry_response",
    "ENTRY_TEMPLATE_VERSION", "DELTA_TEMPLATE_VERSION",
    "ScriptedProxy", "NON_EXECUTABLE_TEXT",
]
