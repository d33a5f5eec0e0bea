"""Facilitator prompt drafting from spike alerts.

The prompt kind follows the polarity of the spiking card's category:
disagreement asks for clarification, agreement invites deepening, emotional
or custom cards provoke. Prompts are never auto-delivered; the facilitator
flips the delivered flag through the service.
"""

from __future__ import annotations

from ..errors import GatewayUnavailable
from ..jsonutil import stable_hash
from .model import (
    CATEGORY_AGREE,
    CATEGORY_DISAGREE,
    CATEGORY_EMOTION,
    PROMPT_CLARIFYING,
    PROMPT_OPEN,
    PROMPT_PROVOCATIVE,
    FacilitatorPrompt,
    ReflectionDeck,
    SpikeAlert,
)

_KIND_FOR_CATEGORY = {
    CATEGORY_DISAGREE: PROMPT_CLARIFYING,
    CATEGORY_AGREE: PROMPT_OPEN,
    CATEGORY_EMOTION: PROMPT_PROVOCATIVE,
}


def prompt_kind_for(category: str) -> str:
    return _KIND_FOR_CATEGORY.get(category, PROMPT_PROVOCATIVE)


def _window_summary(alert: SpikeAlert, series_counts: dict) -> str:
    parts = []
    for card_id in sorted(series_counts):
        values = series_counts[card_id]
        if alert.window_index < len(values) and values[alert.window_index] > 0:
            parts.append(f"{card_id}={values[alert.window_index]}")
    return ", ".join(parts) if parts else "none"


def generate_prompt(alert: SpikeAlert, deck: ReflectionDeck, segment, speaker: str,
                    series_counts: dict, gateway) -> FacilitatorPrompt:
    """Draft one facilitator question grounded in the alert and its segment."""
    card = deck.card(alert.card_id)
    label = card.label if card else alert.card_id
    kind = prompt_kind_for(card.category if card else "Custom")
    segment_text = segment.text if segment is not None else "(no transcript attached)"
    bindings = {
        "card_label": label,
        "kind": kind.lower(),
        "speaker": speaker,
        "segment_text": segment_text,
        "reflection_counts": _window_summary(alert, series_counts),
    }
    try:
        text = gateway.complete("facilitator_question", bindings)
    except GatewayUnavailable:
        topic = alert.theme or "this point"
        text = (f'The audience strongly signaled "{label}" during {speaker}\'s point '
                f"on {topic}. Could the panel respond?")
    grounding = {
        "alert_id": alert.id,
        "theme": alert.theme,
        "transcript_id": (alert.linked_segment or {}).get("transcript_id"),
        "segment_index": (alert.linked_segment or {}).get("segment_index"),
    }
    return FacilitatorPrompt(
        id=f"prompt-{stable_hash([alert.id, kind, bindings], 16)}",
        kind=kind, text=text, grounding=grounding, delivered=False)
