"""Service configuration: JSON file with environment overrides.

Env vars: DELTA_LISTEN, DELTA_DATA_DIR, DELTA_PROXY_URL, DELTA_PROXY_KEY
(name only - the key itself stays in the environment), DELTA_PROXY_MODEL.
The proxy block picks the backing: "http" for a chat endpoint, "scripted"
for the deterministic table proxy (offline demos and tests).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

from ..proxy import HttpChatProxy, ProxyConfig, ScriptedProxy


@dataclass
class ServiceConfig:
    listen: str = "127.0.0.1:8471"
    data_dir: str = "delta-data"
    proxy_mode: str = "scripted"  # "http" | "scripted"
    proxy_table: Optional[str] = None  # path to a scripted-proxy table file
    proxy_fallback: str = "identity"
    proxy_http: ProxyConfig = field(default_factory=lambda: ProxyConfig(endpoint_url=""))
    max_concurrent_battles: int = 4
    cors_allow_origins: List[str] = field(default_factory=list)
    evolve_queueing: bool = True
    interactive_timeout: float = 60.0

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])

    def build_proxy(self):
        if self.proxy_mode == "http":
            return HttpChatProxy(self.proxy_http)
        if self.proxy_table:
            return ScriptedProxy.from_file(self.proxy_table, fallback=self.proxy_fallback)
        return ScriptedProxy({}, fallback=self.proxy_fallback)


def load_config(path: Optional[Union[str, Path]] = None) -> ServiceConfig:
    raw: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    proxy_raw = raw.get("proxy", {})
    http_cfg = ProxyConfig(
        endpoint_url=os.environ.get("DELTA_PROXY_URL", proxy_raw.get("endpoint_url", "")),
        api_key_ref=proxy_raw.get("api_key_ref", "DELTA_PROXY_KEY"),
        model_name=os.environ.get("DELTA_PROXY_MODEL", proxy_raw.get("model_name", "default")),
        timeout=proxy_raw.get("timeout", 30.0),
        retry_count=proxy_raw.get("retry_count", 2),
        temperature=proxy_raw.get("temperature", 0.2),
    )
    config = ServiceConfig(
        listen=os.environ.get("DELTA_LISTEN", raw.get("listen", "127.0.0.1:8471")),
        data_dir=os.environ.get("DELTA_DATA_DIR", raw.get("data_dir", "delta-data")),
        proxy_mode=proxy_raw.get("mode", "scripted"),
        proxy_table=proxy_raw.get("table"),
        proxy_fallback=proxy_raw.get("fallback", "identity"),
        proxy_http=http_cfg,
        max_concurrent_battles=raw.get("max_concurrent_battles", 4),
        cors_allow_origins=raw.get("cors_allow_origins", []),
        evolve_queueing=raw.get("evolve_queueing", True),
        interactive_timeout=raw.get("interactive_timeout", 60.0),
    )
    Path(config.data_dir).mkdir(parents=True, exist_ok=True)
    return config
