"""Turn labeled clusters into provenance-linked policy recommendations.

A recommendation is an immutable snapshot: its id is derived from the cluster
model fingerprint, so re-clustering mints new ids while re-running the same
model reproduces the same ones. Supporting claims are exactly the cluster
members above the inclusion threshold, and the originating transcript
contexts are exactly the claims' provenances; nothing is invented.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..clock import iso_utc
from ..errors import GatewayUnavailable, NoPositions
from ..graph.model import KIND_POSITION, SOURCE_TRANSCRIPT, STANCE_PRO
from ..insight.fcm import ClusterModel
from ..insight.labeling import LABEL_SAMPLE_SIZE, ClusterLabel
from ..jsonutil import stable_hash

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupportingClaim:
    contribution_id: str
    membership: float

    def to_json(self) -> dict:
        return {"contribution_id": self.contribution_id, "membership": self.membership}


@dataclass(frozen=True)
class PolicyRecommendation:
    id: str
    discussion_id: str
    cluster_index: int
    key_position: str
    supporting_claims: tuple[SupportingClaim, ...]
    originating_contexts: tuple[dict, ...]
    synthesis: str
    generated_at_ms: int
    gateway_tag: str
    model_fingerprint: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "discussion_id": self.discussion_id,
            "cluster_index": self.cluster_index,
            "key_position": self.key_position,
            "supporting_claims": [c.to_json() for c in self.supporting_claims],
            "originating_contexts": [dict(ctx) for ctx in self.originating_contexts],
            "synthesis": self.synthesis,
            "generated_at": iso_utc(self.generated_at_ms),
            "generated_at_ms": self.generated_at_ms,
            "gateway_tag": self.gateway_tag,
            "model_fingerprint": self.model_fingerprint,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PolicyRecommendation":
        return cls(
            id=data["id"], discussion_id=data["discussion_id"],
            cluster_index=data["cluster_index"], key_position=data["key_position"],
            supporting_claims=tuple(SupportingClaim(c["contribution_id"], c["membership"])
                                    for c in data["supporting_claims"]),
            originating_contexts=tuple(data["originating_contexts"]),
            synthesis=data["synthesis"], generated_at_ms=data["generated_at_ms"],
            gateway_tag=data["gateway_tag"], model_fingerprint=data["model_fingerprint"],
        )


def inclusion_threshold(max_membership: float, k: int) -> float:
    """Adaptive claim cutoff: half the cluster's peak membership, floored at 1/k.

    The hard-assigned peak always reaches 1/k, so nondegenerate clusters are
    guaranteed at least one claim.
    """
    return max(0.5 * max_membership, 1.0 / k)


def distill_recommendations(store, discussion_id: str, model: ClusterModel,
                            labels: list[ClusterLabel], ids: list[str], gateway,
                            generated_at_ms: int, tau: float | None = None,
                            ) -> list[PolicyRecommendation]:
    """One recommendation per cluster that clears the inclusion threshold.

    ``ids`` aligns contribution ids with the membership matrix rows. Clusters
    whose members all fall below the threshold are omitted and logged.
    """
    row_of = {cid: i for i, cid in enumerate(ids)}
    recommendations: list[PolicyRecommendation] = []
    for label in labels:
        j = label.cluster_index
        members = [(cid, float(model.membership[row_of[cid], j])) for cid in label.member_ids]
        if not members:
            logger.warning("cluster %d has no hard-assigned members; omitted", j)
            continue
        cutoff = tau if tau is not None else inclusion_threshold(members[0][1], model.k)
        claims = [SupportingClaim(cid, membership) for cid, membership in members
                  if membership >= cutoff]
        if not claims:
            logger.warning("cluster %d: no member reaches threshold %.3f; omitted", j, cutoff)
            continue

        nodes = {claim.contribution_id: store.get_contribution(claim.contribution_id)
                 for claim in claims}
        key_node = next((nodes[c.contribution_id] for c in claims
                         if nodes[c.contribution_id].kind == KIND_POSITION),
                        nodes[claims[0].contribution_id])

        contexts: list[dict] = []
        seen = set()
        for claim in claims:
            prov = nodes[claim.contribution_id].provenance
            if prov.source != SOURCE_TRANSCRIPT:
                continue
            key = (prov.transcript_id, prov.segment_index, tuple(prov.char_range))
            if key in seen:
                continue
            seen.add(key)
            contexts.append({"transcript_id": prov.transcript_id,
                             "segment_index": prov.segment_index,
                             "char_range": list(prov.char_range)})

        member_blob = "\n".join(
            f"- {nodes[c.contribution_id].text}" for c in claims[:LABEL_SAMPLE_SIZE])
        try:
            synthesis = gateway.complete("cluster_synthesis",
                                         {"label": label.title, "member_texts": member_blob})
        except GatewayUnavailable:
            synthesis = label.description

        recommendations.append(PolicyRecommendation(
            id=f"rec-{stable_hash([model.fingerprint, j], 16)}",
            discussion_id=discussion_id,
            cluster_index=j,
            key_position=key_node.text,
            supporting_claims=tuple(claims),
            originating_contexts=tuple(contexts),
            synthesis=synthesis,
            generated_at_ms=generated_at_ms,
            gateway_tag=gateway.tag,
            model_fingerprint=model.fingerprint,
        ))
    return recommendations


@dataclass(frozen=True)
class ProposalPitch:
    text: str
    position_id: str
    source_links: tuple[str, ...]

    def to_json(self) -> dict:
        return {"text": self.text, "position_id": self.position_id,
                "source_links": list(self.source_links)}


def issue_to_proposal(store, issue_id: str, gateway) -> ProposalPitch:
    """Pitch for the strongest position under an issue, grounded in its pro arguments."""
    issue = store.get_contribution(issue_id)
    position_ids = [cid for cid in store.children(issue_id)
                    if store.get_contribution(cid).kind == KIND_POSITION]
    if not position_ids:
        raise NoPositions(f"issue {issue_id} has no positions to pitch")

    ranking = [(cid, score) for cid, score in store.contested_positions(issue.discussion_id)
               if cid in set(position_ids)]
    if ranking:
        top_id = ranking[0][0]
    else:
        top_id = max(position_ids,
                     key=lambda cid: (store.get_contribution(cid).created_at_ms, cid))
    position = store.get_contribution(top_id)
    pro_args = [store.get_contribution(cid) for cid in store.children(top_id)
                if store.get_contribution(cid).stance == STANCE_PRO]

    pro_blob = "\n".join(f"- {arg.text}" for arg in pro_args) or "- (no recorded arguments)"
    try:
        text = gateway.complete("proposal_pitch", {
            "issue": issue.text, "position": position.text, "pro_arguments": pro_blob})
    except GatewayUnavailable:
        text = (f"Proposal: {position.text}. Raised under '{issue.text}' and supported by "
                f"{len(pro_args)} recorded argument(s).")
    return ProposalPitch(
        text=text, position_id=top_id,
        source_links=(top_id, *[arg.id for arg in pro_args]))
