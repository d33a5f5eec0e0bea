"""IBIS domain types: discussions, contributions, provenance.

A discussion is a forest rooted at issues: Issue -> Positions -> pro/con
Arguments, with counter-arguments nesting at most two levels below a position.
Every node carries immutable provenance (an online post, or a character span
of a stored transcript segment).

Values are immutable after creation; the endorsement count is the only field
that changes, and it lives in the store, not on the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from ..clock import iso_utc
from ..errors import ValidationError

KIND_ISSUE = "Issue"
KIND_POSITION = "Position"
KIND_ARGUMENT = "Argument"
KINDS = (KIND_ISSUE, KIND_POSITION, KIND_ARGUMENT)

STANCE_PRO = "Pro"
STANCE_CON = "Con"
STANCE_NONE = "None"
STANCES = (STANCE_PRO, STANCE_CON, STANCE_NONE)

PHASE_OPEN = "Open"
PHASE_ANALYZING = "Analyzing"
PHASE_REPORTING = "Reporting"
PHASE_CLOSED = "Closed"
PHASES = (PHASE_OPEN, PHASE_ANALYZING, PHASE_REPORTING, PHASE_CLOSED)

SOURCE_ONLINE = "OnlinePost"
SOURCE_TRANSCRIPT = "TranscriptSpan"

# Counter-arguments may answer an argument, but no deeper: a position's
# pro/con columns stay renderable as one layer plus a navigable sub-level.
MAX_ARGUMENT_DEPTH = 2


@dataclass(frozen=True)
class Provenance:
    source: str
    transcript_id: Optional[str] = None
    segment_index: Optional[int] = None
    char_range: Optional[tuple[int, int]] = None
    import_session_id: Optional[str] = None

    def __post_init__(self):
        if self.source == SOURCE_TRANSCRIPT:
            if self.transcript_id is None or self.segment_index is None or self.char_range is None:
                raise ValidationError(
                    "transcript provenance requires transcript_id, segment_index and char_range",
                    invariant="TranscriptSpan provenance carries transcript_id, segment_index and char_range",
                )
            if self.segment_index < 0:
                raise ValidationError("segment_index must be >= 0")
            start, end = self.char_range
            if not (0 <= start < end):
                raise ValidationError("char_range must be a non-empty [start, end) span")
        elif self.source == SOURCE_ONLINE:
            if self.transcript_id is not None or self.segment_index is not None or self.char_range is not None:
                raise ValidationError(
                    "online-post provenance carries no transcript fields",
                    invariant="OnlinePost provenance has no transcript fields",
                )
        else:
            raise ValidationError(f"unknown provenance source '{self.source}'")

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "transcript_id": self.transcript_id,
            "segment_index": self.segment_index,
            "char_range": list(self.char_range) if self.char_range is not None else None,
            "import_session_id": self.import_session_id,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Provenance":
        char_range = data.get("char_range")
        return cls(
            source=data["source"],
            transcript_id=data.get("transcript_id"),
            segment_index=data.get("segment_index"),
            char_range=tuple(char_range) if char_range is not None else None,
            import_session_id=data.get("import_session_id"),
        )


ONLINE = Provenance(source=SOURCE_ONLINE)


@dataclass(frozen=True)
class Contribution:
    id: str
    discussion_id: str
    kind: str
    stance: str
    text: str
    author: str
    parent: Optional[str]
    provenance: Provenance
    created_at_ms: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown contribution kind '{self.kind}'")
        if self.stance not in STANCES:
            raise ValidationError(f"unknown stance '{self.stance}'")
        if not self.text or not self.text.strip():
            raise ValidationError("contribution text must be non-empty",
                                  invariant="contribution text is non-empty UTF-8")

    def to_json(self, endorsements: int = 0) -> dict:
        return {
            "id": self.id,
            "discussion_id": self.discussion_id,
            "kind": self.kind,
            "stance": self.stance,
            "text": self.text,
            "author": self.author,
            "parent": self.parent,
            "provenance": self.provenance.to_json(),
            "created_at": iso_utc(self.created_at_ms),
            "created_at_ms": self.created_at_ms,
            "endorsements": endorsements,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Contribution":
        return cls(
            id=data["id"],
            discussion_id=data["discussion_id"],
            kind=data["kind"],
            stance=data["stance"],
            text=data["text"],
            author=data["author"],
            parent=data.get("parent"),
            provenance=Provenance.from_json(data["provenance"]),
            created_at_ms=data["created_at_ms"],
        )


@dataclass(frozen=True)
class Discussion:
    id: str
    title: str
    focal_question: str  # contribution id of the root issue
    phase: str
    created_at_ms: int
    members: frozenset[str] = field(default_factory=frozenset)

    def with_phase(self, phase: str) -> "Discussion":
        return replace(self, phase=phase)

    def with_member(self, participant: str) -> "Discussion":
        return replace(self, members=self.members | {participant})

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "focal_question": self.focal_question,
            "phase": self.phase,
            "created_at": iso_utc(self.created_at_ms),
            "created_at_ms": self.created_at_ms,
            "members": sorted(self.members),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Discussion":
        return cls(
            id=data["id"],
            title=data["title"],
            focal_question=data["focal_question"],
            phase=data["phase"],
            created_at_ms=data["created_at_ms"],
            members=frozenset(data.get("members", ())),
        )
