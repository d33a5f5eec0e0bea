"""In-memory platform state, rebuilt by replaying the event log.

``PlatformState.apply`` is the only mutation path: every handler validates
against current state, then mutates, using only data carried by the record
(ids and timestamps included), so ``log -> state`` is a pure function and
replay is deterministic. Commands that involve classifiers or the model
gateway run that work *before* appending, and the record stores the result.
"""

from __future__ import annotations

from dataclasses import replace

from ..errors import UnknownEvent, UnknownSession, UnknownTranscript, ValidationError
from ..graph.model import Provenance
from ..graph.store import DiscussionStore
from ..reflection.live import LiveEvent
from ..reflection.model import FacilitatorPrompt, ReflectionDeck, SpikeAlert
from ..transcripts.model import (
    STATE_ANALYZED,
    STATE_APPROVED,
    STATE_MERGED,
    STATE_REJECTED,
    STATE_UNDER_REVIEW,
    STATE_UPLOADED,
    DraftIbis,
    ImportSession,
    Transcript,
)
from ..transcripts.workflow import _step, apply_patch
from .eventlog import LogRecord


class PlatformState:
    """Aggregate of all module stores; doubles as the provenance resolver."""

    def __init__(self):
        self.store = DiscussionStore()
        self.transcripts: dict[str, Transcript] = {}
        self.sessions: dict[str, ImportSession] = {}
        self.events: dict[str, LiveEvent] = {}
        self.event_meta: dict[str, dict] = {}
        self.alerts: dict[str, dict[str, SpikeAlert]] = {}
        self.prompts: dict[str, dict[str, FacilitatorPrompt]] = {}
        self.recommendations: dict[str, dict] = {}

    # provenance resolver protocol
    def get_transcript(self, transcript_id: str):
        return self.transcripts.get(transcript_id)

    def get_import_session(self, session_id: str):
        return self.sessions.get(session_id)

    def require_transcript(self, transcript_id: str) -> Transcript:
        transcript = self.transcripts.get(transcript_id)
        if transcript is None:
            raise UnknownTranscript(f"transcript {transcript_id} not found")
        return transcript

    def require_session(self, session_id: str) -> ImportSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"import session {session_id} not found")
        return session

    def require_event(self, event_id: str) -> LiveEvent:
        event = self.events.get(event_id)
        if event is None:
            raise UnknownEvent(f"live event {event_id} not found")
        return event

    # --- record application ---

    def apply(self, record: LogRecord) -> None:
        handler = getattr(self, f"_apply_{record.kind}", None)
        if handler is None:
            raise ValidationError(f"unknown record kind '{record.kind}'")
        handler(record.payload, record.ts)

    def _apply_discussion_created(self, p: dict, ts: int) -> None:
        self.store.create_discussion(
            p["title"], p["question_text"], p["author"],
            discussion_id=p["discussion_id"], question_id=p["question_id"],
            created_at_ms=ts)

    def _apply_contribution_added(self, p: dict, ts: int) -> None:
        self.store.add_contribution(
            p["discussion_id"], p["kind"], p["stance"], p["text"], p["author"],
            p.get("parent"), Provenance.from_json(p["provenance"]),
            contribution_id=p["contribution_id"], created_at_ms=ts)

    def _apply_contribution_endorsed(self, p: dict, ts: int) -> None:
        self.store.endorse(p["contribution_id"], p["participant"])

    def _apply_phase_advanced(self, p: dict, ts: int) -> None:
        self.store.advance_phase(p["discussion_id"], p["phase"])

    def _apply_transcript_registered(self, p: dict, ts: int) -> None:
        transcript = Transcript.from_json(p["transcript"], transcript_id=p["transcript_id"])
        self.transcripts[transcript.id] = transcript

    def _apply_import_created(self, p: dict, ts: int) -> None:
        self.require_transcript(p["transcript_id"])
        self.store.get_discussion(p["target_discussion_id"])
        session = ImportSession(id=p["session_id"], transcript_id=p["transcript_id"],
                                target_discussion_id=p["target_discussion_id"])
        session = session.with_changes(audit=session.audited(p["actor"], "uploaded", ts))
        self.sessions[session.id] = session

    def _apply_import_analyzed(self, p: dict, ts: int) -> None:
        session = self.require_session(p["session_id"])
        draft = DraftIbis.from_json(p["draft"])
        state = _step(session, STATE_ANALYZED)
        audit = session.audited(p["actor"], "analyzed", ts,
                                nodes=len(draft.nodes), warnings=list(draft.warnings))
        session = session.with_changes(state=state, draft=draft, audit=audit)
        state = _step(session, STATE_UNDER_REVIEW)
        self.sessions[session.id] = session.with_changes(
            state=state, audit=session.audited(p["actor"], "review_started", ts))

    def _apply_draft_edited(self, p: dict, ts: int) -> None:
        session = self.require_session(p["session_id"])
        transcript = self.require_transcript(session.transcript_id)
        self.sessions[session.id] = apply_patch(session, transcript, p["actor"],
                                                p["patch"], ts)

    def _apply_import_approved(self, p: dict, ts: int) -> None:
        from ..transcripts.workflow import approve

        session = self.require_session(p["session_id"])
        self.sessions[session.id] = approve(session, p["actor"], ts)

    def _apply_import_rejected(self, p: dict, ts: int) -> None:
        from ..transcripts.workflow import reject

        session = self.require_session(p["session_id"])
        self.sessions[session.id] = reject(session, p["actor"], p["reason"], ts)

    def _apply_import_merged(self, p: dict, ts: int) -> None:
        from ..transcripts.workflow import MergePlan, PlannedInsert, execute_merge

        session = self.require_session(p["session_id"])
        plan = MergePlan(
            inserts=tuple(PlannedInsert(
                draft_id=i["draft_id"], contribution_id=i["contribution_id"],
                kind=i["kind"], stance=i["stance"], text=i["text"], author=i["author"],
                parent=i["parent"], provenance=Provenance.from_json(i["provenance"]),
            ) for i in p["inserts"]),
            mapping=dict(p["mapping"]),
        )
        merged, _ = execute_merge(session, self.store, plan, p["actor"], ts)
        self.sessions[session.id] = merged

    def _apply_live_event_created(self, p: dict, ts: int) -> None:
        deck = ReflectionDeck.from_json(p["deck"])
        if p["event_id"] in self.events:
            raise ValidationError(f"event {p['event_id']} already exists")
        self.events[p["event_id"]] = LiveEvent(p["event_id"], deck)
        self.event_meta[p["event_id"]] = {
            "title": p.get("title", p["event_id"]),
            "window_ms": p.get("window_ms", 15_000),
            "baseline_n": p.get("baseline_n", 10),
            "z_threshold": p.get("z_threshold", 3.0),
        }
        self.alerts.setdefault(p["event_id"], {})
        self.prompts.setdefault(p["event_id"], {})

    def _apply_event_transcript_attached(self, p: dict, ts: int) -> None:
        event = self.require_event(p["event_id"])
        self.require_transcript(p["transcript_id"])
        event.attach_transcript(p["transcript_id"])

    def _apply_reflection_recorded(self, p: dict, ts: int) -> None:
        event = self.require_event(p["event_id"])
        event.record(p["participant"], p["card_id"], p["t_ms"])

    def _apply_event_clock_advanced(self, p: dict, ts: int) -> None:
        self.require_event(p["event_id"]).advance_clock(p["now_ms"])

    def _apply_event_closed(self, p: dict, ts: int) -> None:
        self.require_event(p["event_id"]).close()

    def _apply_alerts_detected(self, p: dict, ts: int) -> None:
        bucket = self.alerts.setdefault(p["event_id"], {})
        for raw in p["alerts"]:
            alert = SpikeAlert.from_json(raw)
            bucket[alert.id] = alert

    def _apply_prompt_drafted(self, p: dict, ts: int) -> None:
        prompt = FacilitatorPrompt.from_json(p["prompt"])
        self.prompts.setdefault(p["event_id"], {})[prompt.id] = prompt

    def _apply_prompt_delivered(self, p: dict, ts: int) -> None:
        bucket = self.prompts.get(p["event_id"], {})
        prompt = bucket.get(p["prompt_id"])
        if prompt is None:
            raise ValidationError(f"prompt {p['prompt_id']} not found")
        bucket[p["prompt_id"]] = replace(prompt, delivered=True)

    def _apply_recommendations_distilled(self, p: dict, ts: int) -> None:
        self.store.get_discussion(p["discussion_id"])
        self.recommendations[p["discussion_id"]] = {
            "k": p["k"], "fingerprint": p["fingerprint"],
            "recommendations": p["recommendations"], "labels": p["labels"],
        }

    # --- snapshots ---

    def to_snapshot(self) -> dict:
        return {
            "store": self.store.to_snapshot(),
            "transcripts": {tid: t.to_json() for tid, t in sorted(self.transcripts.items())},
            "sessions": {sid: s.to_json() for sid, s in sorted(self.sessions.items())},
            "events": {eid: e.to_snapshot_state() for eid, e in sorted(self.events.items())},
            "event_meta": {eid: dict(meta) for eid, meta in sorted(self.event_meta.items())},
            "alerts": {eid: [a.to_json() for _, a in sorted(bucket.items())]
                       for eid, bucket in sorted(self.alerts.items())},
            "prompts": {eid: [p.to_json() for _, p in sorted(bucket.items())]
                        for eid, bucket in sorted(self.prompts.items())},
            "recommendations": {did: payload
                                for did, payload in sorted(self.recommendations.items())},
        }

    @classmethod
    def from_snapshot(cls, data: dict) -> "PlatformState":
        state = cls()
        state.store = DiscussionStore.from_snapshot(data["store"])
        for tid, raw in data.get("transcripts", {}).items():
            state.transcripts[tid] = Transcript.from_json(raw, transcript_id=tid)
        for sid, raw in data.get("sessions", {}).items():
            state.sessions[sid] = ImportSession.from_json(raw)
        for eid, raw in data.get("events", {}).items():
            state.events[eid] = LiveEvent.from_snapshot_state(raw)
        state.event_meta = {eid: dict(meta) for eid, meta in data.get("event_meta", {}).items()}
        for eid, bucket in data.get("alerts", {}).items():
            state.alerts[eid] = {a["id"]: SpikeAlert.from_json(a) for a in bucket}
        for eid, bucket in data.get("prompts", {}).items():
            state.prompts[eid] = {p["id"]: FacilitatorPrompt.from_json(p) for p in bucket}
        state.recommendations = dict(data.get("recommendations", {}))
        return state
