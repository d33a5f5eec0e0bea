"""Clock abstraction so deterministic runs can replace wall time."""

from __future__ import annotations

import time
from datetime import datetime, timezone

# Fixed origin for deterministic timestamps: 2026-01-01T00:00:00Z.
DETERMINISTIC_EPOCH_MS = 1_767_225_600_000


def iso_utc(ms: int) -> str:
    dt = datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ms % 1000:03d}Z"


class SystemClock:
    def now_ms(self) -> int:
        return time.time_ns() // 1_000_000


class FixedStepClock:
    """Logical clock: each tick advances one second from a fixed epoch.

    Used when byte-identical replays matter more than real time.
    """

    def __init__(self, start_ms: int = DETERMINISTIC_EPOCH_MS, step_ms: int = 1000):
        self._now = start_ms
        self._step = step_ms

    def now_ms(self) -> int:
        current = self._now
        self._now += self._step
        return current

    def peek_ms(self) -> int:
        return self._now

    def set_ms(self, value: int) -> None:
        self._now = max(self._now, value)
