"""Proxy interface and configuration.

A proxy is anything that can (a) pick method entries off a skeleton and
(b) generate increment source from retrieved context plus an instruction.
Implementations must answer or raise; never hang past their timeout.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import TYPE_CHECKING, Protocol, Sequence, runtime_checkable

if TYPE_CHECKING:
    from ..engine import Instruction, RetrievedContext, Skeleton


class ProxyError(Exception):
    """Transport-level failure talking to the model endpoint.

    kind is "transport", "timeout", or "bad_status".
    """

    def __init__(self, kind: str, detail: str):
        super().__init__(f"proxy {kind}: {detail}")
        self.kind = kind
        self.detail = detail


@runtime_checkable
class NeuralProxy(Protocol):
    def select_entries(self, sk: "Skeleton", instruction: "Instruction") -> Sequence[str]:
        ...

    def generate_delta(self, context: "RetrievedContext", instruction: "Instruction") -> str:
        ...


@dataclass(frozen=True)
class ProxyConfig:
    endpoint_url: str
    # name of the environment variable holding the key; the key itself is
    # never stored, logged, or serialized
    api_key_ref: str = "DELTA_PROXY_KEY"
    model_name: str = "default"
    timeout: float = 30.0
    retry_count: int = 2
    temperature: float = 0.2
    backoff_base: float = 0.25

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if not 0 <= self.retry_count <= 5:
            raise ValueError("retry_count must be between 0 and 5")

    def api_key(self) -> str:
        return os.environ.get(self.api_key_ref, "")

    @classmethod
    def from_env(cls, **overrides) -> "ProxyConfig":
        base = dict(
            endpoint_url=os.environ.get("DELTA_PROXY_URL", ""),
            api_key_ref="DELTA_PROXY_KEY",
            model_name=os.environ.get("DELTA_PROXY_MODEL", "default"),
        )
        base.update(overrides)
        return cls(**base)
