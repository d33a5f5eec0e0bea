"""Transcript import domain types.

The ingestion contract for diarized transcripts is JSON:
``{event_title, language, segments: [{speaker, start_ms, end_ms, text}]}``,
identical for file upload and CLI.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from ..errors import ValidationError
from ..graph.model import Provenance

COMPONENT_CLAIM = "Claim"
COMPONENT_PREMISE = "Premise"

REL_SUPPORTS = "Supports"
REL_ATTACKS = "Attacks"

STATE_UPLOADED = "Uploaded"
STATE_ANALYZED = "Analyzed"
STATE_UNDER_REVIEW = "UnderReview"
STATE_APPROVED = "Approved"
STATE_REJECTED = "Rejected"
STATE_MERGED = "Merged"
SESSION_STATES = (STATE_UPLOADED, STATE_ANALYZED, STATE_UNDER_REVIEW,
                  STATE_APPROVED, STATE_REJECTED, STATE_MERGED)

# The only legal moves; everything else is WrongState.
LEGAL_TRANSITIONS = frozenset({
    (STATE_UPLOADED, STATE_ANALYZED),
    (STATE_ANALYZED, STATE_UNDER_REVIEW),
    (STATE_UNDER_REVIEW, STATE_APPROVED),
    (STATE_UNDER_REVIEW, STATE_REJECTED),
    (STATE_APPROVED, STATE_MERGED),
})


@dataclass(frozen=True)
class Segment:
    speaker: str
    start_ms: int
    end_ms: int
    text: str

    def __post_init__(self):
        if self.start_ms < 0 or self.end_ms <= self.start_ms:
            raise ValidationError("segment needs 0 <= start_ms < end_ms",
                                  invariant="end_ms > start_ms for all segments")

    def to_json(self) -> dict:
        return {"speaker": self.speaker, "start_ms": self.start_ms,
                "end_ms": self.end_ms, "text": self.text}


@dataclass(frozen=True)
class Transcript:
    id: str
    event_title: str
    language: str
    segments: tuple[Segment, ...]

    def __post_init__(self):
        last_start = -1
        per_speaker_end: dict[str, int] = {}
        for seg in self.segments:
            if seg.start_ms < last_start:
                raise ValidationError("segments must be ordered by start_ms",
                                      invariant="segments ordered by start_ms")
            last_start = seg.start_ms
            if seg.start_ms < per_speaker_end.get(seg.speaker, 0):
                raise ValidationError(
                    f"overlapping segments for speaker '{seg.speaker}'",
                    invariant="segments non-overlapping per speaker")
            per_speaker_end[seg.speaker] = seg.end_ms

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "event_title": self.event_title,
            "language": self.language,
            "segments": [seg.to_json() for seg in self.segments],
        }

    @classmethod
    def from_json(cls, data: dict, transcript_id: str | None = None) -> "Transcript":
        try:
            segments = tuple(Segment(
                speaker=str(seg["speaker"]),
                start_ms=int(seg["start_ms"]),
                end_ms=int(seg["end_ms"]),
                text=str(seg["text"]),
            ) for seg in data["segments"])
            return cls(
                id=transcript_id or data.get("id", ""),
                event_title=str(data["event_title"]),
                language=str(data.get("language", "en")),
                segments=segments,
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed transcript payload: {exc}") from exc


@dataclass(frozen=True)
class Relation:
    target: str
    type: str

    def to_json(self) -> dict:
        return {"target": self.target, "type": self.type}


@dataclass(frozen=True)
class ComponentMarkup:
    id: str
    segment_index: int
    char_range: tuple[int, int]
    component: str
    confidence: float
    relations: tuple[Relation, ...] = ()

    def __post_init__(self):
        if self.component not in (COMPONENT_CLAIM, COMPONENT_PREMISE):
            raise ValidationError(f"unknown component '{self.component}'")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError("confidence must lie in [0, 1]")
        for rel in self.relations:
            if rel.type not in (REL_SUPPORTS, REL_ATTACKS):
                raise ValidationError(f"unknown relation type '{rel.type}'")
            if rel.target == self.id:
                raise ValidationError("markup cannot relate to itself",
                                      invariant="no self-relation in markup")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "segment_index": self.segment_index,
            "char_range": list(self.char_range),
            "component": self.component,
            "confidence": self.confidence,
            "relations": [rel.to_json() for rel in self.relations],
        }


@dataclass(frozen=True)
class DraftNode:
    id: str
    kind: str
    stance: str
    text: str
    author: str
    parent: Optional[str]
    provenance: Provenance

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "stance": self.stance,
            "text": self.text,
            "author": self.author,
            "parent": self.parent,
            "provenance": self.provenance.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DraftNode":
        return cls(
            id=data["id"], kind=data["kind"], stance=data["stance"], text=data["text"],
            author=data["author"], parent=data.get("parent"),
            provenance=Provenance.from_json(data["provenance"]),
        )


@dataclass(frozen=True)
class DraftIbis:
    nodes: tuple[DraftNode, ...] = ()
    warnings: tuple[str, ...] = ()

    def node_map(self) -> dict[str, DraftNode]:
        return {node.id: node for node in self.nodes}

    def to_json(self) -> dict:
        return {
            "nodes": [node.to_json() for node in self.nodes],
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DraftIbis":
        return cls(
            nodes=tuple(DraftNode.from_json(n) for n in data.get("nodes", ())),
            warnings=tuple(data.get("warnings", ())),
        )


@dataclass(frozen=True)
class AuditEntry:
    actor: str
    action: str
    timestamp_ms: int
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"actor": self.actor, "action": self.action,
                "timestamp_ms": self.timestamp_ms, "detail": self.detail}

    @classmethod
    def from_json(cls, data: dict) -> "AuditEntry":
        return cls(actor=data["actor"], action=data["action"],
                   timestamp_ms=data["timestamp_ms"], detail=data.get("detail", {}))


@dataclass(frozen=True)
class ImportSession:
    id: str
    transcript_id: str
    target_discussion_id: str
    state: str = STATE_UPLOADED
    draft: DraftIbis = DraftIbis()
    audit: tuple[AuditEntry, ...] = ()
    reject_reason: Optional[str] = None
    merged_ids: dict = field(default_factory=dict)  # draft node id -> contribution id

    def with_changes(self, **kwargs) -> "ImportSession":
        return replace(self, **kwargs)

    def audited(self, actor: str, action: str, timestamp_ms: int, **detail) -> tuple[AuditEntry, ...]:
        return self.audit + (AuditEntry(actor, action, timestamp_ms, dict(detail)),)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "transcript_id": self.transcript_id,
            "target_discussion_id": self.target_discussion_id,
            "state": self.state,
            "draft": self.draft.to_json(),
            "audit": [entry.to_json() for entry in self.audit],
            "reject_reason": self.reject_reason,
            "merged_ids": dict(sorted(self.merged_ids.items())),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ImportSession":
        return cls(
            id=data["id"],
            transcript_id=data["transcript_id"],
            target_discussion_id=data["target_discussion_id"],
            state=data["state"],
            draft=DraftIbis.from_json(data.get("draft", {})),
            audit=tuple(AuditEntry.from_json(e) for e in data.get("audit", ())),
            reject_reason=data.get("reject_reason"),
            merged_ids=dict(data.get("merged_ids", {})),
        )
