from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agora.errors import (
    ClassifierUnavailable,
    PatchBreaksInvariant,
    TargetDiscussionClosed,
    ValidationError,
    WrongState,
)
from agora.gateway import mock_gateway
from agora.graph import DiscussionStore, PHASE_CLOSED
from agora.jsonutil import canonical_dumps
from agora.transcripts import (
    COMPONENT_CLAIM,
    COMPONENT_PREMISE,
    REL_SUPPORTS,
    SESSION_STATES,
    STATE_APPROVED,
    STATE_MERGED,
    STATE_REJECTED,
    STATE_UNDER_REVIEW,
    STATE_UPLOADED,
    ImportSession,
    RuleBasedClassifier,
    Segment,
    Transcript,
    apply_patch,
    approve,
    execute_merge,
    plan_merge,
    reject,
    run_analysis,
    token_jaccard,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


def load_fixture_transcript() -> Transcript:
    data = json.loads((FIXTURES / "transcript_food_policy.json").read_text())
    return Transcript.from_json(data, transcript_id="t1")


def fresh_session(**kwargs) -> ImportSession:
    defaults = dict(id="s1", transcript_id="t1", target_discussion_id="d1")
    defaults.update(kwargs)
    return ImportSession(**defaults)


def analyzed_session(gateway=None):
    transcript = load_fixture_transcript()
    session = fresh_session()
    return run_analysis(session, transcript, RuleBasedClassifier(),
                        gateway or mock_gateway(), now_ms=1000, actor="curator"), transcript


class TestTranscriptModel:
    def test_segment_requires_positive_duration(self):
        with pytest.raises(ValidationError):
            Segment("a", 100, 100, "x")

    def test_per_speaker_overlap_rejected(self):
        with pytest.raises(ValidationError):
            Transcript(id="t", event_title="e", language="en", segments=(
                Segment("a", 0, 10_000, "one"),
                Segment("a", 5_000, 12_000, "two"),
            ))

    def test_interleaved_speakers_allowed(self):
        transcript = Transcript(id="t", event_title="e", language="en", segments=(
            Segment("a", 0, 10_000, "one"),
            Segment("b", 5_000, 12_000, "two"),
        ))
        assert len(transcript.segments) == 2


class TestClassifier:
    def test_because_splits_claim_and_premise(self):
        segments = (Segment("s", 0, 1000, "We should ban X because it harms Y"),)
        markup = RuleBasedClassifier().classify_segments(segments)
        assert len(markup) == 2
        claim, premise = markup
        text = segments[0].text
        assert claim.component == COMPONENT_CLAIM
        assert text[claim.char_range[0]:claim.char_range[1]] == "We should ban X"
        assert premise.component == COMPONENT_PREMISE
        assert text[premise.char_range[0]:premise.char_range[1]] == "it harms Y"
        assert premise.relations[0].target == claim.id
        assert premise.relations[0].type == REL_SUPPORTS

    def test_deterministic_output(self):
        transcript = load_fixture_transcript()
        first = [m.to_json() for m in RuleBasedClassifier().classify_segments(transcript.segments)]
        second = [m.to_json() for m in RuleBasedClassifier().classify_segments(transcript.segments)]
        assert canonical_dumps(first) == canonical_dumps(second)


class TestAnalysis:
    def test_fixture_draft_matches_golden(self):
        session, _ = analyzed_session()
        expected = (GOLDEN / "draft_food_policy.json").read_text()
        assert canonical_dumps(session.draft.to_json()) + "\n" == expected

    def test_fixture_draft_structure(self):
        session, _ = analyzed_session()
        kinds = [node.kind for node in session.draft.nodes]
        assert kinds.count("Issue") >= 1
        assert kinds.count("Position") >= 2
        assert kinds.count("Argument") >= 2
        assert session.state == STATE_UNDER_REVIEW
        actions = [entry.action for entry in session.audit]
        assert actions == ["analyzed", "review_started"]

    def test_byte_identical_across_runs(self):
        first, _ = analyzed_session()
        second, _ = analyzed_session()
        assert canonical_dumps(first.draft.to_json()) == canonical_dumps(second.draft.to_json())

    def test_empty_transcript_advances_with_warning(self):
        transcript = Transcript(id="t0", event_title="Empty", language="en", segments=())
        session = run_analysis(fresh_session(transcript_id="t0"), transcript,
                               RuleBasedClassifier(), mock_gateway(), 0, "curator")
        assert session.state == STATE_UNDER_REVIEW
        assert session.draft.nodes == ()
        assert any("no non-empty segments" in w for w in session.draft.warnings)

    def test_gateway_down_falls_back_to_event_title(self):
        class DownGateway:
            def complete(self, *a, **k):
                from agora.errors import GatewayUnavailable
                raise GatewayUnavailable("down")

        transcript = load_fixture_transcript()
        session = run_analysis(fresh_session(), transcript, RuleBasedClassifier(),
                               DownGateway(), 0, "curator")
        assert session.draft.nodes[0].text == "Community Food Policy Roundtable"

    def test_classifier_failure_keeps_session_uploaded(self):
        class Broken:
            def classify_segments(self, segments):
                raise RuntimeError("model endpoint down")

        transcript = load_fixture_transcript()
        session = fresh_session()
        with pytest.raises(ClassifierUnavailable):
            run_analysis(session, transcript, Broken(), mock_gateway(), 0, "curator")
        assert session.state == STATE_UPLOADED

    def test_wrong_state_rejected(self):
        transcript = load_fixture_transcript()
        session = fresh_session(state=STATE_APPROVED)
        with pytest.raises(WrongState):
            run_analysis(session, transcript, RuleBasedClassifier(), mock_gateway(), 0, "x")


class TestStateMachine:
    def _attempt(self, op, session, transcript, store):
        if op == "analyze":
            run_analysis(session, transcript, RuleBasedClassifier(), mock_gateway(), 0, "a")
        elif op == "edit":
            apply_patch(session, transcript, "a", [], 0)
        elif op == "approve":
            approve(session, "a", 0)
        elif op == "reject":
            reject(session, "a", "why", 0)
        else:
            plan = plan_merge(session, store, [f"c{i}" for i in range(len(session.draft.nodes))])
            execute_merge(session, store, plan, "a", 0)

    def test_exhaustive_illegal_transitions(self):
        """Every (state, operation) pair outside the legal table is rejected
        and leaves the session untouched."""
        legal_sources = {"analyze": {STATE_UPLOADED}, "edit": {STATE_UNDER_REVIEW},
                         "approve": {STATE_UNDER_REVIEW}, "reject": {STATE_UNDER_REVIEW},
                         "merge": {STATE_APPROVED}}
        transcript = load_fixture_transcript()
        store = DiscussionStore()
        discussion = store.create_discussion("d", "q?", "u0")

        for state in SESSION_STATES:
            for op, sources in legal_sources.items():
                session = fresh_session(state=state,
                                        target_discussion_id=discussion.id)
                before = session
                if state in sources:
                    self._attempt(op, session, transcript, store)  # must not raise
                    continue
                with pytest.raises(WrongState):
                    self._attempt(op, session, transcript, store)
                assert session == before

    def test_reject_then_approve_is_terminal(self):
        session, _ = analyzed_session()
        rejected = reject(session, "curator", "not ready", 5)
        assert rejected.state == STATE_REJECTED
        assert rejected.reject_reason == "not ready"
        with pytest.raises(WrongState):
            approve(rejected, "curator", 6)


class TestEditDraft:
    def test_retype_preserves_provenance(self):
        session, transcript = analyzed_session()
        target = next(n for n in session.draft.nodes if n.kind == "Argument" and n.stance == "Pro")
        patched = apply_patch(session, transcript, "curator",
                              [{"op": "retype", "node": target.id, "stance": "Con"}], 10)
        updated = patched.draft.node_map()[target.id]
        assert updated.stance == "Con"
        assert updated.provenance == target.provenance
        assert updated.text == target.text

    def test_reparent_cycle_rejected_atomically(self):
        session, transcript = analyzed_session()
        draft_before = session.draft
        position = next(n for n in session.draft.nodes if n.kind == "Position")
        child = next(n for n in session.draft.nodes if n.parent == position.id)
        with pytest.raises(PatchBreaksInvariant):
            apply_patch(session, transcript, "curator", [
                {"op": "retext", "node": position.id, "text": "changed first"},
                {"op": "reparent", "node": position.id, "parent": child.id},
            ], 10)
        assert session.draft == draft_before

    def test_delete_position_removes_children_transitively(self):
        session, transcript = analyzed_session()
        counts = {}
        for node in session.draft.nodes:
            if node.parent:
                counts[node.parent] = counts.get(node.parent, 0) + 1
        position = next(n for n in session.draft.nodes
                        if n.kind == "Position" and counts.get(n.id, 0) == 2)
        patched = apply_patch(session, transcript, "curator",
                              [{"op": "delete", "node": position.id}], 10)
        assert len(patched.draft.nodes) == len(session.draft.nodes) - 3
        assert patched.audit[-1].detail["removed"] == 3

    def test_insert_requires_transcript_provenance(self):
        session, transcript = analyzed_session()
        with pytest.raises(PatchBreaksInvariant):
            apply_patch(session, transcript, "curator", [{
                "op": "insert",
                "node": {"id": "x1", "kind": "Position", "stance": "None",
                         "text": "made up", "author": "curator", "parent": "n0",
                         "provenance": {"source": "OnlinePost"}},
            }], 10)

    def test_insert_with_valid_span(self):
        session, transcript = analyzed_session()
        patched = apply_patch(session, transcript, "curator", [{
            "op": "insert",
            "node": {"id": "x1", "kind": "Position", "stance": "None",
                     "text": "A market hall anchors growers", "author": "curator",
                     "parent": "n0",
                     "provenance": {"source": "TranscriptSpan", "transcript_id": "t1",
                                    "segment_index": 6, "char_range": [0, 30],
                                    "import_session_id": "s1"}},
        }], 10)
        assert "x1" in patched.draft.node_map()


@st.composite
def random_patch(draw, node_ids):
    op = draw(st.sampled_from(["retype", "retext", "reparent", "delete"]))
    node = draw(st.sampled_from(node_ids))
    if op == "retype":
        kind = draw(st.sampled_from(["Issue", "Position", "Argument"]))
        stance = draw(st.sampled_from(["Pro", "Con", "None"]))
        return {"op": "retype", "node": node, "kind": kind, "stance": stance}
    if op == "retext":
        return {"op": "retext", "node": node,
                "text": draw(st.text(min_size=0, max_size=12))}
    if op == "reparent":
        parent = draw(st.one_of(st.none(), st.sampled_from(node_ids)))
        return {"op": "reparent", "node": node, "parent": parent}
    return {"op": "delete", "node": node}


class TestEditAtomicity:
    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_random_patches_apply_fully_or_not_at_all(self, data):
        session, transcript = analyzed_session()
        node_ids = [n.id for n in session.draft.nodes]
        patch = data.draw(st.lists(random_patch(node_ids), min_size=1, max_size=5))
        before = session.draft
        try:
            patched = apply_patch(session, transcript, "curator", patch, 0)
        except PatchBreaksInvariant:
            assert session.draft == before
        else:
            from agora.transcripts import validate_draft
            validate_draft(patched.draft, transcript)


class TestMerge:
    def _target(self, question_text):
        store = DiscussionStore()
        discussion = store.create_discussion("Food policy", question_text, "host")
        return store, discussion

    def test_matching_issue_threads_into_focal_question(self):
        session, transcript = analyzed_session()
        approved = approve(session, "curator", 20)
        issue_text = approved.draft.nodes[0].text
        store, discussion = self._target(issue_text)
        ids = [f"c{i:02d}" for i in range(len(approved.draft.nodes))]
        plan = plan_merge(approved.with_changes(target_discussion_id=discussion.id), store, ids)
        assert plan.mapping["n0"] == discussion.focal_question
        assert len(plan.inserts) == len(approved.draft.nodes) - 1
        issues = [c for c in store.contributions_of(discussion.id) if c.kind == "Issue"]
        assert len(issues) == 1

    def test_distinct_issue_inserted_as_new(self):
        session, transcript = analyzed_session()
        approved = approve(session, "curator", 20)
        store, discussion = self._target("Should the city pedestrianise the ring road?")
        approved = approved.with_changes(target_discussion_id=discussion.id)
        ids = [f"c{i:02d}" for i in range(len(approved.draft.nodes))]
        plan = plan_merge(approved, store, ids)
        merged, returned = execute_merge(approved, store, plan, "curator", 30)
        assert merged.state == STATE_MERGED
        assert len(returned) == len(approved.draft.nodes)
        issues = [c for c in store.contributions_of(discussion.id) if c.kind == "Issue"]
        assert len(issues) == 2
        # every merged node resolves through provenance end to end
        class Resolver:
            def get_transcript(self, tid):
                return transcript if tid == transcript.id else None
            def get_import_session(self, sid):
                return merged if sid == merged.id else None
        for cid in returned:
            if cid == discussion.focal_question:
                continue
            chain = store.provenance_trace(cid, Resolver())
            assert chain[1].type == "transcript_span"

    def test_second_merge_rejected(self):
        session, transcript = analyzed_session()
        approved = approve(session, "curator", 20)
        store, discussion = self._target("Anything?")
        approved = approved.with_changes(target_discussion_id=discussion.id)
        ids = [f"c{i:02d}" for i in range(len(approved.draft.nodes))]
        plan = plan_merge(approved, store, ids)
        merged, _ = execute_merge(approved, store, plan, "curator", 30)
        with pytest.raises(WrongState):
            plan_merge(merged, store, ids)

    def test_closed_target_rejected(self):
        session, transcript = analyzed_session()
        approved = approve(session, "curator", 20)
        store, discussion = self._target("Anything?")
        store.advance_phase(discussion.id, PHASE_CLOSED)
        approved = approved.with_changes(target_discussion_id=discussion.id)
        with pytest.raises(TargetDiscussionClosed):
            plan_merge(approved, store, ["x"] * len(approved.draft.nodes))


class TestTokenJaccard:
    def test_exact_match(self):
        assert token_jaccard("How should we eat?", "how SHOULD we eat") == 1.0

    def test_disjoint(self):
        assert token_jaccard("apples", "oranges") == 0.0

    def test_partial(self):
        value = token_jaccard("tax sugar now", "tax sugar later")
        assert value == pytest.approx(2 / 4)
