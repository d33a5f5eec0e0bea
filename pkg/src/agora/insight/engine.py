"""Embedding sets and the cached reclustering entry point."""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..jsonutil import stable_hash
from .fcm import DEFAULT_M, DEFAULT_MAX_ITER, DEFAULT_TOL, ClusterModel, fcm_fit

NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class EmbeddingSet:
    ids: tuple[str, ...]
    vectors: np.ndarray     # (n, d), rows L2-normalized
    model_tag: str

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] < 2:
            raise ValidationError("embedding matrix must be (n, d>=2)")
        if len(self.ids) != len(vectors):
            raise ValidationError("one id per embedding row required")
        norms = np.linalg.norm(vectors, axis=1)
        if len(vectors) and np.max(np.abs(norms - 1.0)) > NORM_TOLERANCE:
            raise ValidationError("embedding rows must be L2-normalized",
                                  invariant="embedding rows are unit length within 1e-6")
        object.__setattr__(self, "vectors", vectors)

    @property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update("\x1f".join(self.ids).encode("utf-8"))
        digest.update(self.model_tag.encode("utf-8"))
        digest.update(np.ascontiguousarray(self.vectors).tobytes())
        return digest.hexdigest()[:16]


class ClusterEngine:
    """Deterministic clustering with a (fingerprint, k) result cache.

    The cache is the one shared structure in this module; a lock keeps it
    safe under concurrent readers and writers, and ``dict.setdefault`` makes
    the first stored model canonical even if two threads raced to compute it.
    """

    def __init__(self, m: float = DEFAULT_M, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER):
        self.m = m
        self.tol = tol
        self.max_iter = max_iter
        self._cache: dict[tuple, ClusterModel] = {}
        self._lock = threading.Lock()

    def recluster(self, embeddings: EmbeddingSet, k: int, seed: int) -> ClusterModel:
        key = (embeddings.fingerprint, k, self.m, seed)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        model = fcm_fit(embeddings.vectors, k, m=self.m, tol=self.tol,
                        max_iter=self.max_iter, seed=seed)
        # the model fingerprint identifies the full fit, not just the inputs:
        # a different k or seed over the same embeddings is a different model
        fit_print = stable_hash([embeddings.fingerprint, k, self.m, seed], 16)
        model = ClusterModel(
            k=model.k, m=model.m, centroids=model.centroids, membership=model.membership,
            objective_trace=model.objective_trace, seed=model.seed,
            iterations=model.iterations, converged=model.converged,
            fingerprint=fit_print)
        with self._lock:
            return self._cache.setdefault(key, model)

    def cache_size(self) -> int:
        with self._lock:
            return len(self._cache)
