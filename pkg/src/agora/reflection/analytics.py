"""Windowed engagement aggregation and spike detection.

Aggregation is a pure recount of the accepted log into contiguous windows
from t=0. Spike detection is causal: the score of window w uses only the
trailing ``baseline_n`` windows before it, so replaying a prefix of the log
yields a prefix of the alerts.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

from ..errors import SeriesTooShort
from .live import LiveEvent
from .model import EngagementSeries, SpikeAlert

DEFAULT_WINDOW_MS = 15_000
DEFAULT_BASELINE_N = 10
DEFAULT_Z_THRESHOLD = 3.0

# One-click noise scale: a flat baseline never divides by zero and a single
# stray click never looks infinitely significant.
SIGMA_FLOOR = 0.5


def aggregate(event: LiveEvent, window_ms: int) -> EngagementSeries:
    if window_ms <= 0:
        raise ValueError("window_ms must be positive")
    log = event.snapshot()
    horizon = event.horizon_ms()
    n_windows = max(0, math.ceil(horizon / window_ms))
    counts = {card_id: [0] * n_windows for card_id in event.deck.card_ids()}
    for entry in log:
        idx = entry.t_ms // window_ms
        if idx >= n_windows:  # clock may trail the newest accepted event
            extend_by = idx + 1 - n_windows
            for values in counts.values():
                values.extend([0] * extend_by)
            n_windows = idx + 1
        counts[entry.card_id][idx] += 1
    return EngagementSeries(event_id=event.event_id, window_ms=window_ms,
                            n_windows=n_windows, counts=counts,
                            accepted_total=len(log))


def _segment_for_window(transcript, window_start: int, window_end: int) -> Optional[int]:
    """Segment with the largest overlap with the window; ties to the lowest index."""
    best_index = None
    best_overlap = 0
    for idx, segment in enumerate(transcript.segments):
        overlap = min(segment.end_ms, window_end) - max(segment.start_ms, window_start)
        if overlap > best_overlap:
            best_overlap = overlap
            best_index = idx
    return best_index


def detect_spikes(series: EngagementSeries, baseline_n: int = DEFAULT_BASELINE_N,
                  z_threshold: float = DEFAULT_Z_THRESHOLD, sigma_floor: float = SIGMA_FLOOR,
                  transcript=None, themes: Sequence | None = None) -> list[SpikeAlert]:
    if series.n_windows < baseline_n + 1:
        raise SeriesTooShort(
            f"need at least {baseline_n + 1} windows, series has {series.n_windows}")
    alerts: list[SpikeAlert] = []
    for card_id in sorted(series.counts):
        values = series.counts[card_id]
        for w in range(baseline_n, series.n_windows):
            baseline = values[w - baseline_n:w]
            mu = sum(baseline) / baseline_n
            variance = sum((x - mu) ** 2 for x in baseline) / baseline_n
            sigma = max(math.sqrt(variance), sigma_floor)
            z = (values[w] - mu) / sigma
            if z < z_threshold:
                continue
            window_range = (w * series.window_ms, (w + 1) * series.window_ms)
            linked = None
            theme = None
            if transcript is not None:
                seg_index = _segment_for_window(transcript, *window_range)
                if seg_index is not None:
                    linked = {"transcript_id": transcript.id, "segment_index": seg_index}
                    if themes:
                        for candidate in themes:
                            if seg_index in candidate.segment_indices:
                                theme = candidate.theme
                                break
            alerts.append(SpikeAlert(
                id=f"alert-{series.event_id}-{card_id}-{w}",
                event_id=series.event_id, card_id=card_id, window_index=w,
                z_score=z, count=values[w], window_range_ms=window_range,
                linked_segment=linked, theme=theme))
    return alerts
