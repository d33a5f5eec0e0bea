"""Gateway configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError

MODE_REMOTE = "Remote"
MODE_MOCK = "Mock"


@dataclass(frozen=True)
class GatewayConfig:
    """Connection settings for the external model service.

    ``auth_env`` names the environment variable holding the bearer token; the
    secret itself never appears in config files or logs.
    """

    mode: str = MODE_MOCK
    endpoint: str = ""
    auth_env: str = "AGORA_GATEWAY_TOKEN"
    timeout_ms: int = 10_000
    max_retries: int = 2
    backoff_base_ms: int = 100
    embed_dim: int = 32
    max_batch: int = 128
    batch_policy: str = "split"  # or "reject"
    max_concurrency: int = 4

    def __post_init__(self):
        if self.mode not in (MODE_REMOTE, MODE_MOCK):
            raise ValidationError(f"unknown gateway mode '{self.mode}'")
        if self.timeout_ms <= 0:
            raise ValidationError("timeout_ms must be positive")
        if not 0 <= self.max_retries <= 5:
            raise ValidationError("max_retries must be between 0 and 5")
        if self.batch_policy not in ("split", "reject"):
            raise ValidationError("batch_policy must be 'split' or 'reject'")
        if self.mode == MODE_REMOTE and not self.endpoint:
            raise ValidationError("remote mode requires an endpoint URL")
