"""Deterministic 2D projection of embeddings.

The default method is PCA via singular value decomposition of the
mean-centered matrix: coordinates are the projections onto the top-2
principal directions, and the sign of each direction is fixed so that its
largest-magnitude loading is positive (ties resolve to the earliest index).
The projection sits behind ``Projector`` so a neighborhood-preserving method
can be substituted without touching callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from ..errors import TooFewPoints

ZERO_VARIANCE_TAG = "zero-variance"


@dataclass(frozen=True)
class ThemeMap:
    ids: tuple[str, ...]
    coords: np.ndarray               # (n, 2)
    method_tag: str
    explained_variance: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "ids": list(self.ids),
            "coords": self.coords.tolist(),
            "method_tag": self.method_tag,
            "explained_variance": list(self.explained_variance),
        }


class Projector(Protocol):
    def project(self, ids: Sequence[str], vectors: np.ndarray) -> ThemeMap: ...


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Flip each component so its largest |loading| entry is positive."""
    fixed = components.copy()
    for row in range(fixed.shape[0]):
        pivot = int(np.argmax(np.abs(fixed[row])))
        if fixed[row, pivot] < 0:
            fixed[row] = -fixed[row]
    return fixed


class PcaProjector:
    method_tag = "pca-svd"

    def project(self, ids: Sequence[str], vectors: np.ndarray) -> ThemeMap:
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] < 2:
            raise ValueError("need an (n, d>=2) matrix")
        if len(ids) != len(vectors):
            raise ValueError("ids and vectors must align")
        if len(vectors) < 3:
            raise TooFewPoints("2D projection needs at least 3 points")

        centered = vectors - vectors.mean(axis=0)
        total_variance = float(np.sum(centered ** 2))
        if total_variance <= 1e-18:
            # all points identical: no direction to find, flag it
            return ThemeMap(
                ids=tuple(ids), coords=np.zeros((len(vectors), 2)),
                method_tag=f"{self.method_tag}:{ZERO_VARIANCE_TAG}",
                explained_variance=(0.0, 0.0))

        _, singular_values, vt = np.linalg.svd(centered, full_matrices=False)
        components = _fix_signs(vt[:2])
        coords = centered @ components.T
        ratios = (singular_values ** 2) / (singular_values ** 2).sum()
        explained = (float(ratios[0]), float(ratios[1]) if len(ratios) > 1 else 0.0)
        return ThemeMap(ids=tuple(ids), coords=coords,
                        method_tag=self.method_tag, explained_variance=explained)


def project_2d(ids: Sequence[str], vectors: np.ndarray,
               projector: Projector | None = None) -> ThemeMap:
    return (projector or PcaProjector()).project(ids, vectors)
