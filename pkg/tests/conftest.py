from __future__ import annotations

import json
from pathlib import Path

import pytest

from agora.gateway import mock_gateway
from agora.graph import DiscussionStore
from agora.insight import ClusterEngine, EmbeddingSet, label_clusters
from agora.transcripts import (
    ImportSession,
    RuleBasedClassifier,
    Transcript,
    approve,
    execute_merge,
    plan_merge,
    run_analysis,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


class MergedFixture:
    """Transcript fixture imported end to end into a live discussion."""

    def __init__(self):
        self.gateway = mock_gateway()
        self.store = DiscussionStore()
        data = json.loads((FIXTURES / "transcript_food_policy.json").read_text())
        self.transcript = Transcript.from_json(data, transcript_id="t1")
        self.discussion = self.store.create_discussion(
            "Food policy roundtable", "How should the city make food fair and sustainable?",
            "host", discussion_id="d1", question_id="q1", created_at_ms=0)
        session = ImportSession(id="s1", transcript_id="t1",
                                target_discussion_id=self.discussion.id)
        session = run_analysis(session, self.transcript, RuleBasedClassifier(),
                               self.gateway, now_ms=1000, actor="curator")
        session = approve(session, "curator", 2000)
        ids = [f"c{i:02d}" for i in range(len(session.draft.nodes))]
        plan = plan_merge(session, self.store, ids)
        self.session, self.merged_ids = execute_merge(session, self.store, plan,
                                                      "curator", 3000)

    def get_transcript(self, transcript_id):
        return self.transcript if transcript_id == self.transcript.id else None

    def get_import_session(self, session_id):
        return self.session if session_id == self.session.id else None

    def clusterable_ids(self):
        """Positions and arguments, excluding issues (clustering scope)."""
        return [c.id for c in self.store.contributions_of(self.discussion.id)
                if c.kind in ("Position", "Argument")]

    def embeddings(self) -> EmbeddingSet:
        ids = self.clusterable_ids()
        texts = [self.store.get_contribution(cid).text for cid in ids]
        vectors = self.gateway.embed_texts(texts)
        return EmbeddingSet(ids=tuple(ids), vectors=vectors, model_tag="mock-32")

    def clustered(self, k=4, seed=17):
        embeddings = self.embeddings()
        engine = ClusterEngine()
        model = engine.recluster(embeddings, k=k, seed=seed)
        texts = {cid: self.store.get_contribution(cid).text for cid in embeddings.ids}
        labels = label_clusters(model, list(embeddings.ids), texts, self.gateway)
        return embeddings, model, labels


@pytest.fixture
def merged_fixture():
    return MergedFixture()
