"""Chat-completion client over the de-facto wire format.

POST {model, messages: [{role, content}...], temperature, max_tokens};
response {choices: [{message: {content}}]}. Retries with exponential
backoff on transport errors and 5xx status; a well-formed but useless
completion is never retried here (callers must observe first failure).
The API key is read from the environment at call time and never logged.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Optional, Sequence

import requests

from .base import ProxyConfig, ProxyError
from .prompts import PromptBundle, build_delta_prompt, build_entry_prompt, extract_delta, parse_entry_response

if TYPE_CHECKING:
    from ..engine import Instruction, RetrievedContext, Skeleton

logger = logging.getLogger(__name__)


class ChatClient:
    """One configured chat-completion endpoint."""

    def __init__(self, config: ProxyConfig, session: Optional[requests.Session] = None):
        self.config = config
        self.session = session or requests.Session()

    def complete(self, system: str, user: str, temperature: float, max_tokens: int) -> str:
        import time

        cfg = self.config
        payload = {
            "model": cfg.model_name,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": temperature,
            "max_tokens": max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        key = cfg.api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        last: Optional[ProxyError] = None
        for attempt in range(cfg.retry_count + 1):
            if attempt:
                time.sleep(cfg.backoff_base * (2 ** (attempt - 1)))
            try:
                resp = self.session.post(cfg.endpoint_url, json=payload, headers=headers, timeout=cfg.timeout)
            except requests.Timeout:
                last = ProxyError("timeout", f"no response within {cfg.timeout}s")
                continue
            except requests.RequestException as exc:
                last = ProxyError("transport", str(exc))
                continue
            if resp.status_code >= 500:
                last = ProxyError("bad_status", f"server returned {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise ProxyError("bad_status", f"server returned {resp.status_code}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ProxyError("transport", f"malformed completion body: {exc}") from exc
        assert last is not None
        logger.warning("chat call failed after %d attempts: %s", cfg.retry_count + 1, last)
        raise last

    def complete_bundle(self, bundle: PromptBundle) -> str:
        return self.complete(bundle.system, bundle.user, bundle.temperature, bundle.max_tokens)


class HttpChatProxy:
    """Two-phase proxy backed by a chat endpoint. Entry selection runs at
    temperature 0; increment generation uses the configured temperature."""

    def __init__(self, config: ProxyConfig, session: Optional[requests.Session] = None):
        self.client = ChatClient(config, session)
        self.config = config

    def select_entries(self, sk: "Skeleton", instruction: "Instruction") -> Sequence[str]:
        bundle = build_entry_prompt(sk, instruction)
        return parse_entry_response(self.client.complete_bundle(bundle))

    def generate_delta(self, context: "RetrievedContext", instruction: "Instruction") -> str:
        bundle = build_delta_prompt(context, instruction)
        bundle = PromptBundle(bundle.system, bundle.user, bundle.max_tokens,
                              self.config.temperature, bundle.template_version)
        return extract_delta(self.client.complete_bundle(bundle))
