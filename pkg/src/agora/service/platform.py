"""Platform orchestrator: commands append to the log, reads are pure.

One sequencer lock serializes all mutations; every mutation becomes exactly
one log record, applied to state before it is written out (apply validates
first and mutates only after validation, so a failed command leaves both
state and log untouched). Analytics and reports read immutable snapshots and
never hold the sequencer lock while computing.

In deterministic mode (the mock-gateway default) timestamps and ids derive
from the next log sequence number, so the same command sequence over the same
fixtures produces byte-identical logs, snapshots and reports.
"""

from __future__ import annotations

import threading
from pathlib import Path

from ..clock import DETERMINISTIC_EPOCH_MS, SystemClock
from ..errors import AgoraError, TooFewPoints, ValidationError
from ..gateway import Gateway
from ..graph.model import SOURCE_ONLINE, Provenance
from ..ids import DeterministicIdFactory, SystemIdFactory
from ..insight import ClusterEngine, EmbeddingSet, label_clusters, project_2d
from ..jsonutil import stable_hash, stable_seed
from ..policy import distill_recommendations, generate_report, render_markdown
from ..reflection import aggregate, detect_spikes, generate_prompt, keyword_themes
from ..transcripts.model import Transcript
from ..transcripts.workflow import plan_merge, run_analysis, summarize_issue_text
from .config import ServiceConfig
from .eventlog import EventLog, LogRecord, RecoveryReport
from .hub import NotificationHub
from .state import PlatformState

# generous id headroom per record (merges mint many ids in one record)
_IDS_PER_RECORD = 1 << 16


class _GatewayClassifier:
    def __init__(self, gateway: Gateway):
        self._gateway = gateway

    def classify_segments(self, segments):
        return self._gateway.classify_spans(segments)


class Platform:
    def __init__(self, config: ServiceConfig, gateway: Gateway | None = None):
        self.config = config
        self.gateway = gateway or Gateway(config.gateway)
        self.engine = ClusterEngine()
        self._lock = threading.RLock()
        self._clock = SystemClock()
        self._embed_cache: dict[str, EmbeddingSet] = {}
        self.log = EventLog(config.data_dir)
        self.state = PlatformState()
        self.hub = NotificationHub()
        self.recovery = self._recover()

    # --- recovery ---

    def _recover(self) -> RecoveryReport:
        snapshot = self.log.latest_snapshot()
        start_seq = 0
        if snapshot is not None and snapshot[0] <= self.log.last_seq:
            self.state = PlatformState.from_snapshot(snapshot[1])
            start_seq = snapshot[0]
        applied = 0
        for record in self.log.records(after_seq=start_seq):
            self.state.apply(record)
            applied += 1
        self.hub.rebuild(self.log.records())
        return RecoveryReport(snapshot_seq=start_seq, records_applied=applied,
                              dropped_bytes=self.log.dropped_bytes,
                              last_seq=self.log.last_seq)

    # --- deterministic time and ids ---

    def now_ms(self) -> int:
        if self.config.deterministic:
            return DETERMINISTIC_EPOCH_MS + self.log.next_seq * 1000
        return self._clock.now_ms()

    def _id_factory(self):
        if self.config.deterministic:
            return DeterministicIdFactory(base=self.log.next_seq * _IDS_PER_RECORD)
        return SystemIdFactory()

    # --- the single mutation path ---

    def _commit(self, kind: str, payload: dict):
        """Apply-then-append under the sequencer lock."""
        with self._lock:
            ts = self.now_ms()
            record = LogRecord(seq=self.log.next_seq, kind=kind, payload=payload, ts=ts)
            self.state.apply(record)  # validates first; raises leave state untouched
            written = self.log.append(kind, payload, ts)
            assert written.seq == record.seq
            if written.seq % self.config.snapshot_every == 0:
                self.log.write_snapshot(written.seq, self.state.to_snapshot())
            self.hub.publish(written)
            return written

    def close(self) -> None:
        self.log.close()

    # --- discussion commands ---

    def create_discussion(self, title: str, question_text: str, author: str) -> dict:
        if not title.strip() or not question_text.strip():
            raise ValidationError("title and question must be non-empty")
        with self._lock:
            ids = self._id_factory()
            payload = {"discussion_id": ids.new_id(), "question_id": ids.new_id(),
                       "title": title, "question_text": question_text, "author": author}
            self._commit("discussion_created", payload)
        return {"discussion_id": payload["discussion_id"],
                "question_id": payload["question_id"]}

    def add_contribution(self, discussion_id: str, kind: str, stance: str, text: str,
                         author: str, parent: str | None,
                         provenance: dict | None = None) -> str:
        with self._lock:
            prov = provenance or Provenance(source=SOURCE_ONLINE).to_json()
            parsed = Provenance.from_json(prov)  # validate shape before logging
            self._check_span_resolvable(parsed)
            payload = {"discussion_id": discussion_id,
                       "contribution_id": self._id_factory().new_id(),
                       "kind": kind, "stance": stance, "text": text, "author": author,
                       "parent": parent, "provenance": prov}
            self._commit("contribution_added", payload)
        return payload["contribution_id"]

    def _check_span_resolvable(self, provenance: Provenance) -> None:
        """Transcript-span provenance must resolve now, or never enter the store."""
        if provenance.source != "TranscriptSpan":
            return
        transcript = self.state.require_transcript(provenance.transcript_id)
        if not 0 <= provenance.segment_index < len(transcript.segments):
            raise ValidationError(
                f"segment {provenance.segment_index} out of range for transcript "
                f"{provenance.transcript_id}",
                invariant="TranscriptSpan provenance resolves to a stored segment")
        start, end = provenance.char_range
        segment = transcript.segments[provenance.segment_index]
        if not 0 <= start < end <= len(segment.text):
            raise ValidationError(
                f"char range [{start}, {end}) outside segment bounds",
                invariant="char_range lies within the referenced segment's text")
        if provenance.import_session_id is not None:
            self.state.require_session(provenance.import_session_id)

    def endorse(self, contribution_id: str, participant: str) -> int:
        self._commit("contribution_endorsed",
                     {"contribution_id": contribution_id, "participant": participant})
        return self.state.store.endorsements(contribution_id)

    def advance_phase(self, discussion_id: str, phase: str) -> None:
        self._commit("phase_advanced", {"discussion_id": discussion_id, "phase": phase})

    # --- transcript / import commands ---

    def register_transcript(self, data: dict) -> str:
        transcript = Transcript.from_json(data, transcript_id="pending")
        with self._lock:
            transcript_id = self._id_factory().new_id()
            payload = {"transcript_id": transcript_id,
                       "transcript": Transcript.from_json(data, transcript_id=transcript_id).to_json()}
            self._commit("transcript_registered", payload)
        return transcript_id

    def create_import(self, transcript_id: str, discussion_id: str, actor: str) -> str:
        with self._lock:
            self.state.require_transcript(transcript_id)
            self.state.store.get_discussion(discussion_id)
            session_id = self._id_factory().new_id()
            self._commit("import_created", {
                "session_id": session_id, "transcript_id": transcript_id,
                "target_discussion_id": discussion_id, "actor": actor})
        return session_id

    def analyze_import(self, session_id: str, actor: str) -> dict:
        # classification and summarization run outside the sequencer lock
        session = self.state.require_session(session_id)
        transcript = self.state.require_transcript(session.transcript_id)
        preview = run_analysis(session, transcript, _GatewayClassifier(self.gateway),
                               self.gateway, now_ms=0, actor=actor)
        self._commit("import_analyzed", {
            "session_id": session_id, "actor": actor,
            "draft": preview.draft.to_json(),
            "target_discussion_id": session.target_discussion_id})
        return self.state.require_session(session_id).to_json()

    def edit_import(self, session_id: str, actor: str, patch: list[dict]) -> dict:
        session = self.state.require_session(session_id)
        self._commit("draft_edited", {
            "session_id": session_id, "actor": actor, "patch": patch,
            "target_discussion_id": session.target_discussion_id})
        return self.state.require_session(session_id).to_json()

    def approve_import(self, session_id: str, actor: str) -> dict:
        session = self.state.require_session(session_id)
        self._commit("import_approved", {"session_id": session_id, "actor": actor,
                                         "target_discussion_id": session.target_discussion_id})
        return self.state.require_session(session_id).to_json()

    def reject_import(self, session_id: str, actor: str, reason: str) -> dict:
        session = self.state.require_session(session_id)
        self._commit("import_rejected", {"session_id": session_id, "actor": actor,
                                         "reason": reason,
                                         "target_discussion_id": session.target_discussion_id})
        return self.state.require_session(session_id).to_json()

    def merge_import(self, session_id: str, actor: str) -> list[str]:
        with self._lock:
            session = self.state.require_session(session_id)
            ids_factory = self._id_factory()
            # reserve id slot 0 of this record for nothing; mint per node
            new_ids = [ids_factory.new_id() for _ in session.draft.nodes]
            plan = plan_merge(session, self.state.store, new_ids)
            payload = {
                "session_id": session_id, "actor": actor,
                "target_discussion_id": session.target_discussion_id,
                "inserts": [{
                    "draft_id": i.draft_id, "contribution_id": i.contribution_id,
                    "kind": i.kind, "stance": i.stance, "text": i.text,
                    "author": i.author, "parent": i.parent,
                    "provenance": i.provenance.to_json(),
                } for i in plan.inserts],
                "mapping": plan.mapping,
            }
            self._commit("import_merged", payload)
            ordered = [plan.mapping[node.id] for node in session.draft.nodes]
        return ordered

    # --- live event commands ---

    def create_event(self, deck_payload: dict) -> str:
        event_id = deck_payload.get("event_id") or self._id_factory().new_id()
        deck = {"id": deck_payload.get("deck_id", f"deck-{event_id}"),
                "event_id": event_id, "cards": deck_payload.get("cards", [])}
        from ..reflection.model import ReflectionDeck

        try:
            ReflectionDeck.from_json(deck)  # card shape and deck invariants, pre-commit
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed deck payload: {exc}") from exc
        self._commit("live_event_created", {
            "event_id": event_id, "deck": deck,
            "title": deck_payload.get("title", event_id),
            "window_ms": deck_payload.get("window_ms", self.config.window_ms),
            "baseline_n": deck_payload.get("baseline_n", self.config.baseline_n),
            "z_threshold": deck_payload.get("z_threshold", self.config.z_threshold)})
        return event_id

    def attach_event_transcript(self, event_id: str, transcript_id: str) -> None:
        self._commit("event_transcript_attached",
                     {"event_id": event_id, "transcript_id": transcript_id})

    def record_reflection(self, event_id: str, participant: str, card_id: str,
                          t_ms: int) -> dict:
        """Hot path: validate, append, apply; duplicates are not logged."""
        with self._lock:
            event = self.state.require_event(event_id)
            # probe against ingestion rules without mutating: LiveEvent.record
            # both validates and mutates, so do it first, then log on accept.
            outcome = event.record(participant, card_id, t_ms)
            if outcome.status == "accepted":
                ts = self.now_ms()
                written = self.log.append("reflection_recorded", {
                    "event_id": event_id, "participant": participant,
                    "card_id": card_id, "t_ms": t_ms}, ts)
                if written.seq % self.config.snapshot_every == 0:
                    self.log.write_snapshot(written.seq, self.state.to_snapshot())
            return {"status": outcome.status, "accepted_total": outcome.log_length}

    def advance_event_clock(self, event_id: str, now_ms: int) -> None:
        self._commit("event_clock_advanced", {"event_id": event_id, "now_ms": now_ms})

    def close_event(self, event_id: str) -> None:
        self._commit("event_closed", {"event_id": event_id})

    def deliver_prompt(self, event_id: str, prompt_id: str, actor: str) -> None:
        self._commit("prompt_delivered", {"event_id": event_id, "prompt_id": prompt_id,
                                          "actor": actor})

    # --- spike detection sweep ---

    def run_detection(self, event_id: str) -> list[dict]:
        """Aggregate, detect, persist new alerts and draft their prompts."""
        event = self.state.require_event(event_id)
        meta = self.state.event_meta[event_id]
        series = aggregate(event, meta["window_ms"])
        if series.n_windows < meta["baseline_n"] + 1:
            return []
        transcript = (self.state.transcripts.get(event.transcript_id)
                      if event.transcript_id else None)
        themes = keyword_themes(transcript) if transcript is not None else ()
        alerts = detect_spikes(series, meta["baseline_n"], meta["z_threshold"],
                               transcript=transcript, themes=themes)
        known = self.state.alerts.get(event_id, {})
        fresh = [a for a in alerts if a.id not in known]
        if not fresh:
            return []
        self._commit("alerts_detected",
                     {"event_id": event_id, "alerts": [a.to_json() for a in fresh]})
        drafted = []
        for alert in fresh:
            segment = None
            speaker = "the speaker"
            if alert.linked_segment and transcript is not None:
                segment = transcript.segments[alert.linked_segment["segment_index"]]
                speaker = segment.speaker
            prompt = generate_prompt(alert, event.deck, segment, speaker,
                                     series.counts, self.gateway)
            self._commit("prompt_drafted",
                         {"event_id": event_id, "prompt": prompt.to_json()})
            drafted.append(prompt.to_json())
        return drafted

    # --- analytics reads (pure) ---

    def _clusterable(self, discussion_id: str):
        nodes = [c for c in self.state.store.contributions_of(discussion_id)
                 if c.kind in ("Position", "Argument")]
        return nodes

    def embeddings_for(self, discussion_id: str) -> EmbeddingSet:
        nodes = self._clusterable(discussion_id)
        if not nodes:
            raise TooFewPoints(f"discussion {discussion_id} has no clusterable contributions")
        ids = tuple(node.id for node in nodes)
        texts = [node.text for node in nodes]
        cache_key = stable_hash([self.gateway.tag, list(ids), texts], 24)
        with self._lock:
            cached = self._embed_cache.get(cache_key)
        if cached is not None:
            return cached
        vectors = self.gateway.embed_texts(texts)
        embeddings = EmbeddingSet(ids=ids, vectors=vectors,
                                  model_tag=f"embeddings:{self.gateway.tag}")
        with self._lock:
            return self._embed_cache.setdefault(cache_key, embeddings)

    def cluster_seed(self, discussion_id: str) -> int:
        return stable_seed(["cluster-seed", discussion_id])

    def clusters_payload(self, discussion_id: str, k: int) -> dict:
        embeddings = self.embeddings_for(discussion_id)
        model = self.engine.recluster(embeddings, k, seed=self.cluster_seed(discussion_id))
        texts = {cid: self.state.store.get_contribution(cid).text for cid in embeddings.ids}
        labels = label_clusters(model, list(embeddings.ids), texts, self.gateway)
        assignment = model.hard_assignment()
        theme_map = self._theme_map(embeddings)
        coords = {cid: theme_map["coords"][i] for i, cid in enumerate(embeddings.ids)}
        hierarchy = {"name": "discussion", "children": []}
        for label in labels:
            children = [{
                "id": cid,
                "name": texts[cid][:60],
                "value": float(model.membership[list(embeddings.ids).index(cid),
                                                label.cluster_index]),
            } for cid in label.member_ids]
            hierarchy["children"].append({
                "name": label.title, "cluster_index": label.cluster_index,
                "description": label.description, "children": children})
        points = [{"id": cid, "x": coords[cid][0], "y": coords[cid][1],
                   "cluster": int(assignment[i]), "text": texts[cid]}
                  for i, cid in enumerate(embeddings.ids)]
        return {
            "discussion_id": discussion_id,
            "k": k,
            "fingerprint": model.fingerprint,
            "model": {"k": model.k, "m": model.m, "seed": model.seed,
                      "iterations": model.iterations, "converged": model.converged,
                      "objective_trace": list(model.objective_trace)},
            "labels": [label.to_json() for label in labels],
            "hierarchy": hierarchy,
            "points": points,
        }

    def _theme_map(self, embeddings: EmbeddingSet) -> dict:
        theme_map = project_2d(list(embeddings.ids), embeddings.vectors)
        return theme_map.to_json()

    def thememap_payload(self, discussion_id: str) -> dict:
        embeddings = self.embeddings_for(discussion_id)
        payload = self._theme_map(embeddings)
        payload["discussion_id"] = discussion_id
        return payload

    def contested_payload(self, discussion_id: str) -> dict:
        store = self.state.store
        counts = store.position_argument_counts(discussion_id)
        entries = []
        for pid, score in store.contested_positions(discussion_id):
            node = store.get_contribution(pid)
            pro, con = counts[pid]
            entries.append({"position_id": pid, "text": node.text, "score": score,
                            "pro": pro, "con": con})
        return {"discussion_id": discussion_id, "positions": entries}

    def _distilled(self, discussion_id: str, k: int):
        embeddings = self.embeddings_for(discussion_id)
        model = self.engine.recluster(embeddings, k, seed=self.cluster_seed(discussion_id))
        texts = {cid: self.state.store.get_contribution(cid).text for cid in embeddings.ids}
        labels = label_clusters(model, list(embeddings.ids), texts, self.gateway)
        recommendations = distill_recommendations(
            self.state.store, discussion_id, model, labels, list(embeddings.ids),
            self.gateway, generated_at_ms=self.now_ms())
        return model, labels, recommendations

    def recommendations_payload(self, discussion_id: str, k: int | None = None) -> dict:
        stored = self.state.recommendations.get(discussion_id)
        if k is None and stored is not None:
            return dict(stored, discussion_id=discussion_id, source="stored")
        use_k = k or (stored or {}).get("k") or 4
        model, labels, recommendations = self._distilled(discussion_id, use_k)
        return {"discussion_id": discussion_id, "k": use_k,
                "fingerprint": model.fingerprint,
                "labels": [label.to_json() for label in labels],
                "recommendations": [r.to_json() for r in recommendations],
                "source": "computed"}

    def refresh_recommendations(self, discussion_id: str, k: int) -> dict:
        self.state.store.get_discussion(discussion_id)
        model, labels, recommendations = self._distilled(discussion_id, k)
        payload = {"discussion_id": discussion_id, "k": k,
                   "fingerprint": model.fingerprint,
                   "labels": [label.to_json() for label in labels],
                   "recommendations": [r.to_json() for r in recommendations]}
        self._commit("recommendations_distilled", payload)
        return payload

    def report(self, discussion_id: str, style: str) -> tuple[dict, str]:
        self.state.store.get_discussion(discussion_id)
        stored = self.state.recommendations.get(discussion_id)
        use_k = (stored or {}).get("k", 4)
        try:
            _, _, recommendations = self._distilled(discussion_id, use_k)
        except TooFewPoints:
            recommendations = []
        report = generate_report(self.state.store, discussion_id, style, self.gateway,
                                 recommendations, generated_at_ms=self.now_ms())
        return report.to_json(), render_markdown(report)

    # --- views ---

    def discussion_view(self, discussion_id: str) -> dict:
        store = self.state.store
        discussion = store.get_discussion(discussion_id)
        nodes = store.contributions_of(discussion_id)
        return {
            "discussion": discussion.to_json(),
            "contributions": [n.to_json(endorsements=store.endorsements(n.id))
                              for n in nodes],
            "children": {n.id: store.children(n.id) for n in nodes},
        }

    def snapshot_public(self, event_id: str) -> dict:
        event = self.state.require_event(event_id)
        meta = self.state.event_meta[event_id]
        series = aggregate(event, meta["window_ms"])
        return {
            "event_id": event_id,
            "title": meta["title"],
            "closed": event.closed,
            "clock_ms": event.clock_ms,
            "deck": event.deck.to_json(),
            "window_ms": meta["window_ms"],
            "series": series.to_json(),
            "totals": {card: sum(values) for card, values in sorted(series.counts.items())},
        }

    def snapshot_facilitator(self, event_id: str) -> dict:
        snapshot = self.snapshot_public(event_id)
        alerts = self.state.alerts.get(event_id, {})
        prompts = self.state.prompts.get(event_id, {})
        snapshot["alerts"] = [a.to_json() for _, a in sorted(alerts.items())]
        snapshot["prompts"] = [p.to_json() for _, p in sorted(prompts.items())]
        return snapshot

    # --- integrity ---

    def verify(self) -> dict:
        problems = list(self.state.store.verify_integrity(self.state))
        for session in self.state.sessions.values():
            transcript = self.state.transcripts.get(session.transcript_id)
            if transcript is None:
                problems.append(f"session {session.id}: transcript missing")
                continue
            if session.draft.nodes and session.state in ("UnderReview", "Approved"):
                from ..transcripts.workflow import validate_draft

                try:
                    validate_draft(session.draft, transcript)
                except AgoraError as exc:
                    problems.append(f"session {session.id}: {exc}")
        for event_id, event in self.state.events.items():
            meta = self.state.event_meta[event_id]
            series = aggregate(event, meta["window_ms"])
            if sum(sum(v) for v in series.counts.values()) != event.accepted_count():
                problems.append(f"event {event_id}: window counts do not conserve events")
        for discussion_id, payload in self.state.recommendations.items():
            for rec in payload["recommendations"]:
                for claim in rec["supporting_claims"]:
                    try:
                        self.state.store.get_contribution(claim["contribution_id"])
                    except AgoraError:
                        problems.append(
                            f"recommendation {rec['id']}: dangling claim "
                            f"{claim['contribution_id']}")
        return {"ok": not problems, "problems": problems,
                "records": self.log.last_seq,
                "dropped_bytes": self.log.dropped_bytes}
