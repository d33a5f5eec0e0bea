"""Discussion store: insertion, endorsement, contestedness, provenance traces.

Reads are freely concurrent over immutable values; writes are serialized by a
per-store lock (the service layer additionally funnels all mutations through
a single sequencer). Every insert re-checks the forest invariant.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterable, Optional, Protocol

from ..clock import SystemClock
from ..errors import (
    CycleDetected,
    DepthExceeded,
    InvalidParentKind,
    PhaseViolation,
    ProvenanceIntegrityError,
    StanceRequired,
    TargetDiscussionClosed,
    UnknownContribution,
    UnknownDiscussion,
    ValidationError,
)
from ..ids import SystemIdFactory
from .model import (
    KIND_ARGUMENT,
    KIND_ISSUE,
    KIND_POSITION,
    MAX_ARGUMENT_DEPTH,
    PHASE_CLOSED,
    PHASE_OPEN,
    PHASES,
    SOURCE_TRANSCRIPT,
    STANCE_CON,
    STANCE_NONE,
    STANCE_PRO,
    Contribution,
    Discussion,
    Provenance,
)


class ProvenanceResolver(Protocol):
    """Lookups needed to verify transcript-span provenance end to end."""

    def get_transcript(self, transcript_id: str): ...

    def get_import_session(self, session_id: str): ...


@dataclass(frozen=True)
class ProvenanceLink:
    type: str
    detail: dict

    def to_json(self) -> dict:
        return {"type": self.type, **self.detail}


class DiscussionStore:
    def __init__(self, id_factory=None, clock=None):
        self._ids = id_factory or SystemIdFactory()
        self._clock = clock or SystemClock()
        self._lock = threading.RLock()
        self._discussions: dict[str, Discussion] = {}
        self._contributions: dict[str, Contribution] = {}
        self._children: dict[str, list[str]] = {}
        self._endorsers: dict[str, set[str]] = {}

    # --- creation ---

    def create_discussion(self, title: str, question_text: str, author: str, *,
                          discussion_id: str | None = None, question_id: str | None = None,
                          created_at_ms: int | None = None) -> Discussion:
        with self._lock:
            did = discussion_id or self._ids.new_id()
            qid = question_id or self._ids.new_id()
            ts = created_at_ms if created_at_ms is not None else self._clock.now_ms()
            question = Contribution(
                id=qid, discussion_id=did, kind=KIND_ISSUE, stance=STANCE_NONE,
                text=question_text, author=author, parent=None,
                provenance=Provenance(source="OnlinePost"), created_at_ms=ts,
            )
            discussion = Discussion(
                id=did, title=title, focal_question=qid, phase=PHASE_OPEN,
                created_at_ms=ts, members=frozenset({author}),
            )
            self._contributions[qid] = question
            self._children[qid] = []
            self._discussions[did] = discussion
            return discussion

    def add_contribution(self, discussion_id: str, kind: str, stance: str, text: str,
                         author: str, parent: Optional[str], provenance: Provenance, *,
                         contribution_id: str | None = None, created_at_ms: int | None = None,
                         via_merge: bool = False) -> str:
        with self._lock:
            discussion = self._require_discussion(discussion_id)
            if via_merge:
                if discussion.phase == PHASE_CLOSED:
                    raise TargetDiscussionClosed(f"discussion {discussion_id} is closed")
            elif discussion.phase != PHASE_OPEN:
                raise PhaseViolation(f"discussion {discussion_id} is in phase {discussion.phase}, not Open")

            parent_node = None
            if parent is not None:
                parent_node = self._contributions.get(parent)
                if parent_node is None:
                    raise UnknownContribution(f"parent contribution {parent} not found")
                if parent_node.discussion_id != discussion_id:
                    raise InvalidParentKind("parent belongs to a different discussion")

            self._check_kind_rules(kind, stance, parent_node)
            cid = contribution_id or self._ids.new_id()
            if cid in self._contributions:
                raise ValidationError(f"contribution id {cid} already exists")
            ts = created_at_ms if created_at_ms is not None else self._clock.now_ms()
            node = Contribution(
                id=cid, discussion_id=discussion_id, kind=kind, stance=stance, text=text,
                author=author, parent=parent, provenance=provenance, created_at_ms=ts,
            )
            self._assert_forest(node)
            self._contributions[cid] = node
            self._children[cid] = []
            if parent is not None:
                self._children[parent].append(cid)
            self._discussions[discussion_id] = discussion.with_member(author)
            return cid

    def _check_kind_rules(self, kind: str, stance: str, parent_node: Optional[Contribution]) -> None:
        if kind == KIND_ISSUE:
            if parent_node is not None:
                raise InvalidParentKind("issues are roots and take no parent")
            if stance != STANCE_NONE:
                raise ValidationError("issues carry no stance",
                                      invariant="issues carry no stance")
        elif kind == KIND_POSITION:
            if parent_node is None or parent_node.kind != KIND_ISSUE:
                raise InvalidParentKind("positions attach to an issue")
            if stance != STANCE_NONE:
                raise ValidationError("positions carry no stance",
                                      invariant="positions carry no stance")
        elif kind == KIND_ARGUMENT:
            if parent_node is None or parent_node.kind not in (KIND_POSITION, KIND_ARGUMENT):
                raise InvalidParentKind("arguments attach to a position or an argument")
            if stance not in (STANCE_PRO, STANCE_CON):
                raise StanceRequired("arguments require a Pro or Con stance")
            if parent_node.kind == KIND_ARGUMENT and self._argument_depth(parent_node) >= MAX_ARGUMENT_DEPTH:
                raise DepthExceeded(f"argument nesting is capped at {MAX_ARGUMENT_DEPTH} below a position")
        else:
            raise ValidationError(f"unknown contribution kind '{kind}'")

    def _argument_depth(self, node: Contribution) -> int:
        """Levels below the owning position (position child = 1)."""
        depth = 0
        current: Optional[Contribution] = node
        while current is not None and current.kind == KIND_ARGUMENT:
            depth += 1
            current = self._contributions.get(current.parent) if current.parent else None
        return depth

    def _assert_forest(self, node: Contribution) -> None:
        seen = {node.id}
        current = node.parent
        while current is not None:
            if current in seen:
                raise CycleDetected(f"cycle through contribution {current}")
            seen.add(current)
            parent = self._contributions.get(current)
            if parent is None:
                raise UnknownContribution(f"broken parent chain at {current}")
            if parent.parent is None:
                if parent.kind != KIND_ISSUE:
                    raise CycleDetected("root of a contribution chain must be an issue")
                return
            current = parent.parent

    # --- endorsement: the single mutable counter, idempotent per participant ---

    def endorse(self, contribution_id: str, participant: str) -> int:
        with self._lock:
            self._require_contribution(contribution_id)
            endorsers = self._endorsers.setdefault(contribution_id, set())
            endorsers.add(participant)
            return len(endorsers)

    def endorsements(self, contribution_id: str) -> int:
        return len(self._endorsers.get(contribution_id, ()))

    # --- phases ---

    def advance_phase(self, discussion_id: str, phase: str) -> Discussion:
        with self._lock:
            discussion = self._require_discussion(discussion_id)
            if phase not in PHASES:
                raise ValidationError(f"unknown phase '{phase}'")
            if PHASES.index(phase) <= PHASES.index(discussion.phase):
                raise PhaseViolation(
                    f"phase may only advance forward ({discussion.phase} -> {phase} rejected)")
            updated = discussion.with_phase(phase)
            self._discussions[discussion_id] = updated
            return updated

    # --- reads ---

    def get_discussion(self, discussion_id: str) -> Discussion:
        return self._require_discussion(discussion_id)

    def has_discussion(self, discussion_id: str) -> bool:
        return discussion_id in self._discussions

    def get_contribution(self, contribution_id: str) -> Contribution:
        return self._require_contribution(contribution_id)

    def children(self, contribution_id: str) -> list[str]:
        return list(self._children.get(contribution_id, ()))

    def discussion_ids(self) -> list[str]:
        return list(self._discussions)

    def contributions_of(self, discussion_id: str) -> list[Contribution]:
        self._require_discussion(discussion_id)
        return [c for c in self._contributions.values() if c.discussion_id == discussion_id]

    def participants_of(self, discussion_id: str) -> set[str]:
        return {c.author for c in self.contributions_of(discussion_id)}

    # --- contestedness ---

    @staticmethod
    def contested_score(pro: int, con: int) -> float:
        """Balance times volume: (min/max) * ln(1 + pro + con); 0 if one-sided."""
        if pro == 0 or con == 0:
            return 0.0
        return (min(pro, con) / max(pro, con)) * math.log(1 + pro + con)

    def contested_positions(self, discussion_id: str, top_n: int | None = None) -> list[tuple[str, float]]:
        """Positions ranked by contestedness, most contested first.

        Positions without any direct argument are not ranked. Ties break
        toward more recent activity in the position's subtree.
        """
        self._require_discussion(discussion_id)
        ranked: list[tuple[float, int, str]] = []
        for node in self.contributions_of(discussion_id):
            if node.kind != KIND_POSITION:
                continue
            pro = con = 0
            last_activity = node.created_at_ms
            for child_id in self._children.get(node.id, ()):
                child = self._contributions[child_id]
                if child.kind != KIND_ARGUMENT:
                    continue
                if child.stance == STANCE_PRO:
                    pro += 1
                else:
                    con += 1
                last_activity = max(last_activity, self._subtree_last_activity(child_id))
            if pro + con == 0:
                continue
            ranked.append((self.contested_score(pro, con), last_activity, node.id))
        ranked.sort(key=lambda item: (-item[0], -item[1], item[2]))
        result = [(cid, score) for score, _, cid in ranked]
        return result[:top_n] if top_n is not None else result

    def _subtree_last_activity(self, contribution_id: str) -> int:
        latest = self._contributions[contribution_id].created_at_ms
        for child_id in self._children.get(contribution_id, ()):
            latest = max(latest, self._subtree_last_activity(child_id))
        return latest

    def position_argument_counts(self, discussion_id: str) -> dict[str, tuple[int, int]]:
        counts: dict[str, tuple[int, int]] = {}
        for node in self.contributions_of(discussion_id):
            if node.kind != KIND_POSITION:
                continue
            pro = con = 0
            for child_id in self._children.get(node.id, ()):
                child = self._contributions[child_id]
                if child.kind == KIND_ARGUMENT:
                    if child.stance == STANCE_PRO:
                        pro += 1
                    else:
                        con += 1
            counts[node.id] = (pro, con)
        return counts

    # --- provenance ---

    def provenance_trace(self, contribution_id: str,
                         resolver: ProvenanceResolver | None = None) -> list[ProvenanceLink]:
        """Resolve the full chain from a node back to its origin.

        Fails loudly (never returns a silent null) when any link dangles.
        """
        node = self._require_contribution(contribution_id)
        chain = [ProvenanceLink("author", {"participant": node.author})]
        prov = node.provenance
        if prov.source != SOURCE_TRANSCRIPT:
            return chain

        transcript = resolver.get_transcript(prov.transcript_id) if resolver else None
        if transcript is None:
            raise ProvenanceIntegrityError(
                f"contribution {contribution_id} references missing transcript {prov.transcript_id}")
        if not (0 <= prov.segment_index < len(transcript.segments)):
            raise ProvenanceIntegrityError(
                f"segment index {prov.segment_index} out of range for transcript {prov.transcript_id}")
        segment = transcript.segments[prov.segment_index]
        start, end = prov.char_range
        if not (0 <= start < end <= len(segment.text)):
            raise ProvenanceIntegrityError(
                f"char range {prov.char_range} outside segment text bounds")
        chain.append(ProvenanceLink("transcript_span", {
            "transcript_id": prov.transcript_id,
            "segment_index": prov.segment_index,
            "char_range": list(prov.char_range),
            "speaker": segment.speaker,
            "quote": segment.text[start:end],
        }))
        if prov.import_session_id is not None:
            session = resolver.get_import_session(prov.import_session_id) if resolver else None
            if session is None:
                raise ProvenanceIntegrityError(
                    f"contribution {contribution_id} references missing import session "
                    f"{prov.import_session_id}")
            chain.append(ProvenanceLink("import_session", {"session_id": prov.import_session_id}))
        return chain

    # --- integrity / snapshots ---

    def verify_integrity(self, resolver: ProvenanceResolver | None = None) -> list[str]:
        """Re-validate all stored invariants; returns a list of violations."""
        problems: list[str] = []
        with self._lock:
            for discussion in self._discussions.values():
                focal = self._contributions.get(discussion.focal_question)
                if focal is None or focal.kind != KIND_ISSUE:
                    problems.append(f"discussion {discussion.id}: focal question unresolvable")
            for node in self._contributions.values():
                parent_node = self._contributions.get(node.parent) if node.parent else None
                try:
                    self._check_kind_rules(node.kind, node.stance, parent_node)
                    self._assert_forest(node)
                    self.provenance_trace(node.id, resolver)
                except Exception as exc:  # noqa: BLE001 - integrity sweep reports everything
                    problems.append(f"contribution {node.id}: {exc}")
        return problems

    def to_snapshot(self) -> dict:
        with self._lock:
            return {
                "discussions": [d.to_json() for d in self._discussions.values()],
                "contributions": [c.to_json() for c in self._contributions.values()],
                "endorsers": {cid: sorted(people) for cid, people in sorted(self._endorsers.items())},
            }

    @classmethod
    def from_snapshot(cls, data: dict, id_factory=None, clock=None) -> "DiscussionStore":
        store = cls(id_factory=id_factory, clock=clock)
        for raw in data.get("contributions", ()):
            node = Contribution.from_json(raw)
            store._contributions[node.id] = node
            store._children.setdefault(node.id, [])
            if node.parent is not None:
                store._children.setdefault(node.parent, []).append(node.id)
        for raw in data.get("discussions", ()):
            discussion = Discussion.from_json(raw)
            store._discussions[discussion.id] = discussion
        for cid, people in data.get("endorsers", {}).items():
            store._endorsers[cid] = set(people)
        return store

    # --- internals ---

    def _require_discussion(self, discussion_id: str) -> Discussion:
        discussion = self._discussions.get(discussion_id)
        if discussion is None:
            raise UnknownDiscussion(f"discussion {discussion_id} not found")
        return discussion

    def _require_contribution(self, contribution_id: str) -> Contribution:
        node = self._contributions.get(contribution_id)
        if node is None:
            raise UnknownContribution(f"contribution {contribution_id} not found")
        return node
