"""Cluster labeling via the model gateway.

Labeling never blocks the pipeline: if the gateway is down the clusters keep
placeholder titles and their member lists stay intact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GatewayUnavailable
from .fcm import ClusterModel

# Prompts stay bounded: at most this many member texts are shown per cluster.
LABEL_SAMPLE_SIZE = 10

TITLE_MAX_CHARS = 80


@dataclass(frozen=True)
class ClusterLabel:
    cluster_index: int
    title: str
    description: str
    member_ids: tuple[str, ...]  # descending membership, index tie-break

    def to_json(self) -> dict:
        return {
            "cluster_index": self.cluster_index,
            "title": self.title,
            "description": self.description,
            "member_ids": list(self.member_ids),
        }


def cluster_members(model: ClusterModel, ids: list[str]) -> list[tuple[str, ...]]:
    """Hard-assigned member ids per cluster, ordered by descending membership."""
    assignment = model.hard_assignment()
    members: list[tuple[str, ...]] = []
    for j in range(model.k):
        rows = np.flatnonzero(assignment == j)
        ordered = sorted(rows, key=lambda i: (-model.membership[i, j], i))
        members.append(tuple(ids[i] for i in ordered))
    return members


def label_clusters(model: ClusterModel, ids: list[str], texts: dict[str, str],
                   gateway) -> list[ClusterLabel]:
    labels: list[ClusterLabel] = []
    for j, member_ids in enumerate(cluster_members(model, ids)):
        sample = [texts[mid] for mid in member_ids[:LABEL_SAMPLE_SIZE]]
        member_blob = "\n".join(f"- {text}" for text in sample)
        try:
            title = gateway.complete("cluster_label", {"member_texts": member_blob})
            description = gateway.complete("cluster_description", {"member_texts": member_blob})
        except GatewayUnavailable:
            title = f"Cluster {j}"
            description = f"Automatic label unavailable; {len(member_ids)} members."
        labels.append(ClusterLabel(
            cluster_index=j,
            title=title[:TITLE_MAX_CHARS],
            description=description,
            member_ids=member_ids,
        ))
    return labels
