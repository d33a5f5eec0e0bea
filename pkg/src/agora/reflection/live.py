"""Hot-path ingestion of reflection events.

The log is append-only behind a single lock (the sequencer); duplicates
(same participant, card and timestamp) are dropped idempotently; arrivals
older than the reorder buffer, or claiming a timestamp further ahead of the
driven clock than the skew allowance, are rejected with ClockSkewExceeded.
Analytics always read an immutable snapshot and never block ingestion.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from ..errors import ClockSkewExceeded, EventClosed, UnknownCard
from .model import ReflectionDeck, ReflectionEvent

REORDER_BUFFER_MS = 5_000
SKEW_ALLOWANCE_MS = 5_000

STATUS_ACCEPTED = "accepted"
STATUS_DUPLICATE = "duplicate"


@dataclass(frozen=True)
class RecordOutcome:
    status: str  # accepted | duplicate
    log_length: int

    @property
    def accepted(self) -> bool:
        return self.status in (STATUS_ACCEPTED, STATUS_DUPLICATE)


class LiveEvent:
    def __init__(self, event_id: str, deck: ReflectionDeck,
                 reorder_ms: int = REORDER_BUFFER_MS, skew_ms: int = SKEW_ALLOWANCE_MS):
        self.event_id = event_id
        self.deck = deck
        self._reorder_ms = reorder_ms
        self._skew_ms = skew_ms
        self._lock = threading.Lock()
        self._log: list[ReflectionEvent] = []
        self._seen: set[tuple[str, str, int]] = set()
        self._max_t_ms = -1
        self._clock_ms = 0
        self._clock_driven = False  # set once a feeder drives the clock explicitly
        self.closed = False
        self.transcript_id: str | None = None

    @property
    def clock_ms(self) -> int:
        return self._clock_ms

    def advance_clock(self, now_ms: int) -> None:
        with self._lock:
            self._clock_ms = max(self._clock_ms, now_ms)
            self._clock_driven = True

    def close(self) -> None:
        with self._lock:
            self.closed = True

    def attach_transcript(self, transcript_id: str) -> None:
        self.transcript_id = transcript_id

    def record(self, participant: str, card_id: str, t_ms: int) -> RecordOutcome:
        if self.closed:
            raise EventClosed(f"event {self.event_id} is closed")
        if self.deck.card(card_id) is None:
            raise UnknownCard(f"card '{card_id}' is not in the event deck")
        if t_ms < 0:
            raise ClockSkewExceeded("negative timestamp")
        with self._lock:
            if t_ms + self._reorder_ms < self._clock_ms:
                raise ClockSkewExceeded(
                    f"event at {t_ms}ms arrived after the {self._reorder_ms}ms reorder buffer "
                    f"(clock at {self._clock_ms}ms)")
            if self._clock_driven and t_ms > self._clock_ms + self._skew_ms:
                raise ClockSkewExceeded(
                    f"event at {t_ms}ms is ahead of the event clock ({self._clock_ms}ms) "
                    f"beyond the {self._skew_ms}ms allowance")
            key = (participant, card_id, t_ms)
            if key in self._seen:
                return RecordOutcome(STATUS_DUPLICATE, len(self._log))
            self._seen.add(key)
            self._log.append(ReflectionEvent(self.event_id, participant, card_id, t_ms))
            self._max_t_ms = max(self._max_t_ms, t_ms)
            if not self._clock_driven:
                self._clock_ms = max(self._clock_ms, t_ms)
            return RecordOutcome(STATUS_ACCEPTED, len(self._log))

    def snapshot(self) -> tuple[ReflectionEvent, ...]:
        """Immutable view of the accepted log for analytics."""
        with self._lock:
            return tuple(self._log)

    def accepted_count(self) -> int:
        with self._lock:
            return len(self._log)

    def horizon_ms(self) -> int:
        with self._lock:
            return max(self._clock_ms, self._max_t_ms + 1)

    def to_snapshot_state(self) -> dict:
        with self._lock:
            return {
                "event_id": self.event_id,
                "deck": self.deck.to_json(),
                "closed": self.closed,
                "clock_ms": self._clock_ms,
                "clock_driven": self._clock_driven,
                "transcript_id": self.transcript_id,
                "log": [e.to_json() for e in self._log],
            }

    @classmethod
    def from_snapshot_state(cls, data: dict) -> "LiveEvent":
        live = cls(data["event_id"], ReflectionDeck.from_json(data["deck"]))
        live.closed = data["closed"]
        live._clock_ms = data["clock_ms"]
        live._clock_driven = data.get("clock_driven", False)
        live.transcript_id = data.get("transcript_id")
        for raw in data["log"]:
            event = ReflectionEvent(raw["event_id"], raw["participant"],
                                    raw["card_id"], raw["t_ms"])
            live._log.append(event)
            live._seen.add((event.participant, event.card_id, event.t_ms))
            live._max_t_ms = max(live._max_t_ms, event.t_ms)
        return live
