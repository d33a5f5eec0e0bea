"""Client for external AI services: embeddings, completions, span classification.

This is the only module in the codebase that performs network calls. Every
other component receives a ``Gateway`` instance and stays oblivious to whether
it talks to a real provider or to the deterministic mock.

Mock behaviour is fully deterministic:

- ``embed_texts``: unit vector seeded by a stable hash of the text, so equal
  texts always embed identically (dimension 32).
- ``complete``: the canonical digest string ``MOCK[<template>|<hash>]`` where
  the hash covers the slot bindings, enabling golden tests downstream.
- ``classify_spans``: delegates to the rule-based baseline classifier so mock
  and baseline behave identically.
"""

from __future__ import annotations

import os
import threading
import time
from typing import Sequence

import numpy as np

from ..errors import BatchTooLarge, MalformedRemoteResponse, RemoteTimeout
from ..jsonutil import stable_hash, stable_seed
from .config import MODE_MOCK, MODE_REMOTE, GatewayConfig
from .templates import TemplateSet


class Gateway:
    def __init__(self, config: GatewayConfig | None = None, templates: TemplateSet | None = None,
                 transport=None, sleeper=time.sleep):
        self.config = config or GatewayConfig()
        self.templates = templates or TemplateSet()
        self._transport = transport  # injectable httpx transport for tests
        self._sleep = sleeper
        self._semaphore = threading.BoundedSemaphore(self.config.max_concurrency)

    @property
    def is_mock(self) -> bool:
        return self.config.mode == MODE_MOCK

    @property
    def tag(self) -> str:
        return "mock-gateway" if self.is_mock else f"remote:{self.config.endpoint}"

    # --- embeddings ---

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        """One L2-normalized row per text."""
        if not texts:
            raise ValueError("texts must be non-empty")
        if len(texts) > self.config.max_batch:
            if self.config.batch_policy == "reject":
                raise BatchTooLarge(f"{len(texts)} texts exceed max batch {self.config.max_batch}")
            chunks = [texts[i:i + self.config.max_batch] for i in range(0, len(texts), self.config.max_batch)]
            return np.vstack([self.embed_texts(chunk) for chunk in chunks])
        if self.is_mock:
            return np.vstack([self._mock_vector(text) for text in texts])
        payload = self._post("/embeddings", {"texts": list(texts)})
        vectors = np.asarray(payload.get("vectors", []), dtype=float)
        if vectors.shape[0] != len(texts) or vectors.ndim != 2:
            raise MalformedRemoteResponse("embedding count does not match input texts")
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return vectors / norms

    def _mock_vector(self, text: str) -> np.ndarray:
        rng = np.random.default_rng(stable_seed(["embed", text]))
        vec = rng.standard_normal(self.config.embed_dim)
        return vec / np.linalg.norm(vec)

    # --- completions ---

    def complete(self, template_name: str, bindings: dict[str, str]) -> str:
        template = self.templates.get(template_name)
        prompt = template.render(bindings)  # UnboundSlot raised before any network use
        if self.is_mock:
            return f"MOCK[{template_name}|{stable_hash(bindings)}]"
        payload = self._post("/completions", {"prompt": prompt, "template": f"{template.name}@{template.version}"})
        text = payload.get("text")
        if not isinstance(text, str):
            raise MalformedRemoteResponse("completion response missing 'text'")
        return text

    def render_prompt(self, template_name: str, bindings: dict[str, str]) -> str:
        """Render without calling out; used for prompt audits and golden tests."""
        return self.templates.get(template_name).render(bindings)

    # --- span classification ---

    def classify_spans(self, segments: Sequence) -> list:
        """Markup for diarized segments; mock mode mirrors the rule baseline."""
        from ..transcripts.classifier import RuleBasedClassifier, validate_markup

        if self.is_mock:
            return RuleBasedClassifier().classify_segments(segments)
        payload = self._post("/classify", {
            "segments": [{"speaker": s.speaker, "text": s.text} for s in segments],
        })
        spans = payload.get("spans")
        if not isinstance(spans, list):
            raise MalformedRemoteResponse("classifier response missing 'spans'")
        from ..transcripts.model import ComponentMarkup, Relation
        markup = []
        for raw in spans:
            try:
                markup.append(ComponentMarkup(
                    id=str(raw["id"]),
                    segment_index=int(raw["segment_index"]),
                    char_range=(int(raw["char_range"][0]), int(raw["char_range"][1])),
                    component=str(raw["component"]),
                    confidence=float(raw["confidence"]),
                    relations=tuple(Relation(target=str(r["target"]), type=str(r["type"]))
                                    for r in raw.get("relations", ())),
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedRemoteResponse(f"malformed span from classifier: {exc}") from exc
        validate_markup(markup, segments)  # out-of-bounds ranges rejected, never clipped
        return markup

    # --- transport ---

    def _post(self, path: str, body: dict) -> dict:
        import httpx

        url = self.config.endpoint.rstrip("/") + path
        headers = {}
        token = os.environ.get(self.config.auth_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        attempts = self.config.max_retries + 1
        last_error: Exception | None = None
        with self._semaphore:
            client_kwargs = {"timeout": self.config.timeout_ms / 1000.0}
            if self._transport is not None:
                client_kwargs["transport"] = self._transport
            with httpx.Client(**client_kwargs) as client:
                for attempt in range(attempts):
                    try:
                        response = client.post(url, json=body, headers=headers)
                        if response.status_code >= 500:
                            raise httpx.HTTPStatusError("server error", request=response.request, response=response)
                        response.raise_for_status()
                        return response.json()
                    except (httpx.TimeoutException, httpx.HTTPStatusError, httpx.TransportError) as exc:
                        last_error = exc
                        if attempt < attempts - 1:
                            self._sleep(self.config.backoff_base_ms * (2 ** attempt) / 1000.0)
        raise RemoteTimeout(f"gateway call {path} failed after {attempts} attempts: {last_error}")


def mock_gateway(**overrides) -> Gateway:
    return Gateway(GatewayConfig(mode=MODE_MOCK, **overrides))
