"""Service configuration: TOML file with environment-variable overrides."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..gateway import MODE_MOCK, MODE_REMOTE, GatewayConfig


@dataclass(frozen=True)
class TokenEntry:
    token: str
    role: str
    scope: str = "*"


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path = Path("./data")
    host: str = "127.0.0.1"
    port: int = 8400
    deterministic: bool = False         # mock mode pins clocks and ids
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    tokens: tuple[TokenEntry, ...] = ()
    window_ms: int = 15_000
    baseline_n: int = 10
    z_threshold: float = 3.0
    detection_poll_ms: int = 1_000
    snapshot_every: int = 1_000


def load_config(path: str | Path | None = None, **overrides) -> ServiceConfig:
    raw: dict = {}
    if path is not None:
        raw = tomllib.loads(Path(path).read_text())

    service = raw.get("service", {})
    gateway_raw = raw.get("gateway", {})
    reflection = raw.get("reflection", {})

    def env(name, default):
        return os.environ.get(name, default)

    mode = overrides.get("gateway_mode") or env("AGORA_GATEWAY_MODE",
                                                gateway_raw.get("mode", MODE_MOCK))
    gateway = GatewayConfig(
        mode=mode,
        endpoint=env("AGORA_GATEWAY_ENDPOINT", gateway_raw.get("endpoint", "")),
        auth_env=gateway_raw.get("auth_env", "AGORA_GATEWAY_TOKEN"),
        timeout_ms=int(gateway_raw.get("timeout_ms", 10_000)),
        max_retries=int(gateway_raw.get("max_retries", 2)),
        backoff_base_ms=int(gateway_raw.get("backoff_base_ms", 100)),
    )
    tokens = tuple(TokenEntry(t["token"], t["role"], t.get("scope", "*"))
                   for t in raw.get("tokens", ()))
    deterministic = overrides.get("deterministic")
    if deterministic is None:
        deterministic = mode == MODE_MOCK and bool(service.get("deterministic", True))
    return ServiceConfig(
        data_dir=Path(overrides.get("data_dir")
                      or env("AGORA_DATA_DIR", service.get("data_dir", "./data"))),
        host=env("AGORA_HOST", service.get("host", "127.0.0.1")),
        port=int(overrides.get("port") or env("AGORA_PORT", service.get("port", 8400))),
        deterministic=deterministic,
        gateway=gateway,
        tokens=tokens,
        window_ms=int(reflection.get("window_ms", 15_000)),
        baseline_n=int(reflection.get("baseline_n", 10)),
        z_threshold=float(reflection.get("z_threshold", 3.0)),
        detection_poll_ms=int(reflection.get("detection_poll_ms", 1_000)),
        snapshot_every=int(service.get("snapshot_every", 1_000)),
    )
