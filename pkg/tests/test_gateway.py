from __future__ import annotations

import numpy as np
import pytest

from agora.errors import (
    BatchTooLarge,
    MalformedRemoteResponse,
    RemoteTimeout,
    UnboundSlot,
    UnknownTemplate,
    ValidationError,
)
from agora.gateway import Gateway, GatewayConfig, load_templates, mock_gateway
from agora.transcripts import Segment


class TestMockEmbeddings:
    def test_equal_texts_equal_vectors(self):
        gw = mock_gateway()
        vectors = gw.embed_texts(["tax sugar", "tax sugar", "ban cars"])
        assert np.array_equal(vectors[0], vectors[1])
        assert not np.array_equal(vectors[0], vectors[2])

    def test_unit_norm(self):
        gw = mock_gateway()
        vectors = gw.embed_texts([f"text {i}" for i in range(20)])
        assert vectors.shape == (20, 32)
        assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-6)

    def test_stable_across_instances(self):
        first = mock_gateway().embed_texts(["hello"])
        second = mock_gateway().embed_texts(["hello"])
        assert np.array_equal(first, second)

    def test_batch_split(self):
        gw = Gateway(GatewayConfig(mode="Mock", max_batch=8))
        vectors = gw.embed_texts([f"t{i}" for i in range(20)])
        assert vectors.shape == (20, 32)

    def test_batch_reject(self):
        gw = Gateway(GatewayConfig(mode="Mock", max_batch=4, batch_policy="reject"))
        with pytest.raises(BatchTooLarge):
            gw.embed_texts([f"t{i}" for i in range(5)])


class TestMockCompletions:
    def test_digest_format_stable(self):
        gw = mock_gateway()
        first = gw.complete("cluster_label", {"member_texts": "- a\n- b"})
        second = gw.complete("cluster_label", {"member_texts": "- a\n- b"})
        assert first == second
        assert first.startswith("MOCK[cluster_label|")

    def test_unbound_slot_raised_before_network(self):
        gw = mock_gateway()
        with pytest.raises(UnboundSlot):
            gw.complete("cluster_label", {})

    def test_unknown_template(self):
        with pytest.raises(UnknownTemplate):
            mock_gateway().complete("nope", {})

    def test_facilitator_template_includes_segment_and_aggregate(self):
        gw = mock_gateway()
        rendered = gw.render_prompt("facilitator_question", {
            "card_label": "It will not work",
            "kind": "clarifying",
            "speaker": "Dr. Reed",
            "segment_text": "Liability rules will align incentives.",
            "reflection_counts": "disagree=15",
        })
        assert "Liability rules will align incentives." in rendered
        assert "disagree=15" in rendered
        assert "clarifying" in rendered
        assert "It will not work" in rendered

    def test_slot_values_not_reexpanded(self):
        gw = mock_gateway()
        rendered = gw.render_prompt("cluster_label", {"member_texts": "{kind} stays literal"})
        assert "{kind} stays literal" in rendered


class TestTemplates:
    def test_all_bundled_templates_load(self):
        templates = load_templates()
        assert {"issue_summary", "cluster_label", "cluster_description",
                "cluster_synthesis", "proposal_pitch", "theme_extraction",
                "facilitator_question", "report_executive", "report_analytical",
                "report_narrative"} <= set(templates)
        for template in templates.values():
            assert template.version == "1.0.0"
            assert template.slots


class TestRemoteTransport:
    def _gateway(self, handler, max_retries=2):
        import httpx

        config = GatewayConfig(mode="Remote", endpoint="https://models.example",
                               max_retries=max_retries, backoff_base_ms=1)
        return Gateway(config, transport=httpx.MockTransport(handler), sleeper=lambda s: None)

    def test_retry_count_then_timeout(self):
        import httpx

        calls = []

        def handler(request):
            calls.append(request.url.path)
            return httpx.Response(500, json={"error": "boom"})

        gw = self._gateway(handler, max_retries=2)
        with pytest.raises(RemoteTimeout):
            gw.embed_texts(["x"])
        assert len(calls) == 3  # initial attempt + 2 retries

    def test_success_after_transient_failure(self):
        import httpx

        calls = []

        def handler(request):
            calls.append(1)
            if len(calls) < 2:
                return httpx.Response(503)
            return httpx.Response(200, json={"vectors": [[3.0, 4.0]]})

        gw = self._gateway(handler)
        vectors = gw.embed_texts(["x"])
        assert len(calls) == 2
        assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0)

    def test_classifier_contract_round_trip(self):
        import httpx

        def handler(request):
            return httpx.Response(200, json={"spans": [
                {"id": "m0", "segment_index": 0, "char_range": [0, 15],
                 "component": "Claim", "confidence": 0.8, "relations": []},
                {"id": "m1", "segment_index": 0, "char_range": [24, 34],
                 "component": "Premise", "confidence": 0.7,
                 "relations": [{"target": "m0", "type": "Supports"}]},
            ]})

        gw = self._gateway(handler)
        segments = (Segment("s", 0, 1000, "We should ban X because it harms Y"),)
        markup = gw.classify_spans(segments)
        assert [m.component for m in markup] == ["Claim", "Premise"]
        assert markup[1].relations[0].target == "m0"

    def test_out_of_bounds_span_rejected_not_clipped(self):
        import httpx

        def handler(request):
            return httpx.Response(200, json={"spans": [
                {"id": "m0", "segment_index": 0, "char_range": [0, 9999],
                 "component": "Claim", "confidence": 0.8, "relations": []},
            ]})

        gw = self._gateway(handler)
        segments = (Segment("s", 0, 1000, "short text"),)
        with pytest.raises(MalformedRemoteResponse):
            gw.classify_spans(segments)

    def test_mock_classify_matches_rule_baseline(self):
        from agora.transcripts import RuleBasedClassifier

        segments = (Segment("s", 0, 1000, "We should ban X because it harms Y"),)
        via_gateway = mock_gateway().classify_spans(segments)
        direct = RuleBasedClassifier().classify_segments(segments)
        assert [m.to_json() for m in via_gateway] == [m.to_json() for m in direct]


class TestConfig:
    def test_remote_requires_endpoint(self):
        with pytest.raises(ValidationError):
            GatewayConfig(mode="Remote")

    def test_retry_bound(self):
        with pytest.raises(ValidationError):
            GatewayConfig(max_retries=6)


class TestArchitecturalIsolation:
    def test_only_gateway_imports_network_clients(self):
        """Outbound HTTP stays inside the gateway package."""
        import pathlib

        src_root = pathlib.Path(__file__).resolve().parent.parent / "src" / "agora"
        offenders = []
        for path in src_root.rglob("*.py"):
            rel = path.relative_to(src_root)
            text = path.read_text()
            for needle in ("import httpx", "import requests", "import aiohttp",
                           "urllib.request", "import socket"):
                if needle in text and rel.parts[0] != "gateway":
                    offenders.append((str(rel), needle))
        assert offenders == []
