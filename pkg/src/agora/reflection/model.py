"""Live-event reflection domain types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import InvalidDeck, ValidationError

CATEGORY_AGREE = "Agree"
CATEGORY_DISAGREE = "Disagree"
CATEGORY_EMOTION = "Emotion"
CATEGORY_CUSTOM = "Custom"
CATEGORIES = (CATEGORY_AGREE, CATEGORY_DISAGREE, CATEGORY_EMOTION, CATEGORY_CUSTOM)

PROMPT_OPEN = "Open"
PROMPT_CLARIFYING = "Clarifying"
PROMPT_PROVOCATIVE = "Provocative"
PROMPT_KINDS = (PROMPT_OPEN, PROMPT_CLARIFYING, PROMPT_PROVOCATIVE)

DECK_MIN_CARDS = 2
DECK_MAX_CARDS = 16


@dataclass(frozen=True)
class Card:
    card_id: str
    label: str
    category: str

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValidationError(f"unknown card category '{self.category}'")

    def to_json(self) -> dict:
        return {"card_id": self.card_id, "label": self.label, "category": self.category}


@dataclass(frozen=True)
class ReflectionDeck:
    id: str
    event_id: str
    cards: tuple[Card, ...]

    def __post_init__(self):
        if not DECK_MIN_CARDS <= len(self.cards) <= DECK_MAX_CARDS:
            raise InvalidDeck(f"deck needs {DECK_MIN_CARDS}..{DECK_MAX_CARDS} cards, "
                              f"got {len(self.cards)}")
        labels = [card.label for card in self.cards]
        if len(set(labels)) != len(labels):
            raise InvalidDeck("card labels must be unique within a deck")
        ids = [card.card_id for card in self.cards]
        if len(set(ids)) != len(ids):
            raise InvalidDeck("card ids must be unique within a deck")

    def card(self, card_id: str) -> Optional[Card]:
        for card in self.cards:
            if card.card_id == card_id:
                return card
        return None

    def card_ids(self) -> list[str]:
        return [card.card_id for card in self.cards]

    def to_json(self) -> dict:
        return {"id": self.id, "event_id": self.event_id,
                "cards": [card.to_json() for card in self.cards]}

    @classmethod
    def from_json(cls, data: dict) -> "ReflectionDeck":
        return cls(id=data["id"], event_id=data["event_id"],
                   cards=tuple(Card(c["card_id"], c["label"], c["category"])
                               for c in data["cards"]))


@dataclass(frozen=True)
class ReflectionEvent:
    event_id: str
    participant: str
    card_id: str
    t_ms: int

    def __post_init__(self):
        if self.t_ms < 0:
            raise ValidationError("t_ms must be >= 0")

    def to_json(self) -> dict:
        return {"event_id": self.event_id, "participant": self.participant,
                "card_id": self.card_id, "t_ms": self.t_ms}


@dataclass(frozen=True)
class EngagementSeries:
    event_id: str
    window_ms: int
    n_windows: int
    counts: dict  # card_id -> list[int] of length n_windows
    accepted_total: int

    def to_json(self) -> dict:
        return {"event_id": self.event_id, "window_ms": self.window_ms,
                "n_windows": self.n_windows,
                "counts": {card: list(values) for card, values in sorted(self.counts.items())},
                "accepted_total": self.accepted_total}


@dataclass(frozen=True)
class SpikeAlert:
    id: str
    event_id: str
    card_id: str
    window_index: int
    z_score: float
    count: int
    window_range_ms: tuple[int, int]
    linked_segment: Optional[dict] = None  # {transcript_id, segment_index}
    theme: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "event_id": self.event_id,
            "card_id": self.card_id,
            "window_index": self.window_index,
            "z_score": self.z_score,
            "count": self.count,
            "window_range_ms": list(self.window_range_ms),
            "linked_segment": self.linked_segment,
            "theme": self.theme,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SpikeAlert":
        return cls(id=data["id"], event_id=data["event_id"], card_id=data["card_id"],
                   window_index=data["window_index"], z_score=data["z_score"],
                   count=data["count"], window_range_ms=tuple(data["window_range_ms"]),
                   linked_segment=data.get("linked_segment"), theme=data.get("theme"))


@dataclass(frozen=True)
class FacilitatorPrompt:
    id: str
    kind: str
    text: str
    grounding: dict  # alert id / theme / segment refs
    delivered: bool = False

    def __post_init__(self):
        if self.kind not in PROMPT_KINDS:
            raise ValidationError(f"unknown prompt kind '{self.kind}'")

    def to_json(self) -> dict:
        return {"id": self.id, "kind": self.kind, "text": self.text,
                "grounding": self.grounding, "delivered": self.delivered}

    @classmethod
    def from_json(cls, data: dict) -> "FacilitatorPrompt":
        return cls(id=data["id"], kind=data["kind"], text=data["text"],
                   grounding=data["grounding"], delivered=data["delivered"])
