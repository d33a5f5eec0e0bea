"""Deliberation reports: sectioned summaries with resolvable source links.

Styles share one stats block and differ only in prompt template and section
order. Quoted material carries footnote markers ``[n]``; the footnote table
maps each marker to ``contribution:<id>`` so every quote resolves back to the
store. Reports are pure functions of (store snapshot, recommendations, style,
gateway), which makes mock-gateway runs byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..clock import iso_utc
from ..errors import GatewayUnavailable, ValidationError
from ..graph.model import KIND_POSITION
from ..jsonutil import stable_hash
from .distill import PolicyRecommendation

STYLE_EXECUTIVE = "Executive"
STYLE_ANALYTICAL = "Analytical"
STYLE_NARRATIVE = "Narrative"
STYLES = (STYLE_EXECUTIVE, STYLE_ANALYTICAL, STYLE_NARRATIVE)

_SECTION_ORDER = {
    STYLE_EXECUTIVE: ("summary", "recommendations", "contested", "stats"),
    STYLE_ANALYTICAL: ("summary", "stats", "contested", "recommendations"),
    STYLE_NARRATIVE: ("summary", "contested", "recommendations", "stats"),
}

_TEMPLATE_FOR_STYLE = {
    STYLE_EXECUTIVE: "report_executive",
    STYLE_ANALYTICAL: "report_analytical",
    STYLE_NARRATIVE: "report_narrative",
}

CONTESTED_LIMIT = 5


@dataclass(frozen=True)
class ReportSection:
    heading: str
    body: str
    source_links: tuple[str, ...]

    def to_json(self) -> dict:
        return {"heading": self.heading, "body": self.body,
                "source_links": list(self.source_links)}


@dataclass(frozen=True)
class DeliberationReport:
    id: str
    discussion_id: str
    style: str
    sections: tuple[ReportSection, ...]
    stats: dict
    footnotes: tuple[str, ...]  # marker n (1-based) -> contribution id
    generated_at_ms: int
    gateway_tag: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "discussion_id": self.discussion_id,
            "style": self.style,
            "sections": [s.to_json() for s in self.sections],
            "stats": self.stats,
            "footnotes": list(self.footnotes),
            "generated_at": iso_utc(self.generated_at_ms),
            "generated_at_ms": self.generated_at_ms,
            "gateway_tag": self.gateway_tag,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DeliberationReport":
        return cls(
            id=data["id"], discussion_id=data["discussion_id"], style=data["style"],
            sections=tuple(ReportSection(s["heading"], s["body"], tuple(s["source_links"]))
                           for s in data["sections"]),
            stats=data["stats"], footnotes=tuple(data["footnotes"]),
            generated_at_ms=data["generated_at_ms"], gateway_tag=data["gateway_tag"],
        )


class _Footnotes:
    def __init__(self):
        self.links: list[str] = []

    def mark(self, contribution_id: str) -> str:
        self.links.append(contribution_id)
        return f"[{len(self.links)}]"


def compute_stats(store, discussion_id: str) -> dict:
    """Single source of truth for the stats block, identical across styles.

    Counts exclude the focal-question node itself: an untouched discussion
    reports zero contributions.
    """
    discussion = store.get_discussion(discussion_id)
    nodes = [c for c in store.contributions_of(discussion_id)
             if c.id != discussion.focal_question]
    per_position = {pid: {"pro": pro, "con": con}
                    for pid, (pro, con) in sorted(store.position_argument_counts(discussion_id).items())}
    return {
        "n_contributions": len(nodes),
        "n_participants": len({c.author for c in nodes}),
        "per_position": per_position,
        "contested_ranking": [[cid, score] for cid, score in store.contested_positions(discussion_id)],
    }


def generate_report(store, discussion_id: str, style: str, gateway,
                    recommendations: list[PolicyRecommendation],
                    generated_at_ms: int) -> DeliberationReport:
    if style not in STYLES:
        raise ValidationError(f"unknown report style '{style}' (choose from {', '.join(STYLES)})")
    discussion = store.get_discussion(discussion_id)
    focal = store.get_contribution(discussion.focal_question)
    stats = compute_stats(store, discussion_id)
    footnotes = _Footnotes()

    sections = {
        "summary": _summary_section(store, discussion, focal, style, gateway, footnotes),
        "contested": _contested_section(store, discussion_id, footnotes),
        "recommendations": _recommendation_section(store, recommendations, footnotes),
        "stats": _stats_section(stats),
    }
    ordered = tuple(sections[name] for name in _SECTION_ORDER[style])
    body_digest = stable_hash([s.to_json() for s in ordered] + [stats], 16)
    return DeliberationReport(
        id=f"report-{body_digest}",
        discussion_id=discussion_id,
        style=style,
        sections=ordered,
        stats=stats,
        footnotes=tuple(footnotes.links),
        generated_at_ms=generated_at_ms,
        gateway_tag=gateway.tag,
    )


def _top_position_lines(store, discussion_id: str, footnotes: _Footnotes | None):
    lines = []
    counts = store.position_argument_counts(discussion_id)
    for pid, score in store.contested_positions(discussion_id)[:CONTESTED_LIMIT]:
        node = store.get_contribution(pid)
        pro, con = counts[pid]
        marker = f" {footnotes.mark(pid)}" if footnotes else ""
        lines.append(f'- "{node.text}"{marker} (pro {pro} / con {con}, score {score:.3f})')
    return lines


def _summary_section(store, discussion, focal, style, gateway, footnotes) -> ReportSection:
    focal_marker = footnotes.mark(focal.id)
    links = [focal.id]
    prompt_positions = _top_position_lines(store, discussion.id, footnotes=None)
    try:
        body = gateway.complete(_TEMPLATE_FOR_STYLE[style], {
            "focal_question": focal.text,
            "top_positions": "\n".join(prompt_positions) or "- (no positions yet)",
        })
        body = f"Focal question: \"{focal.text}\" {focal_marker}\n{body}"
    except GatewayUnavailable:
        # extractive fallback: quote the strongest material verbatim
        quoted = []
        for pid, _ in store.contested_positions(discussion.id)[:3]:
            node = store.get_contribution(pid)
            quoted.append(f'"{node.text}" {footnotes.mark(pid)}')
            links.append(pid)
        body = (f"Focal question: \"{focal.text}\" {focal_marker}\n"
                + ("Most discussed: " + "; ".join(quoted) if quoted
                   else "No contributions recorded."))
    return ReportSection(heading="Focal question", body=body,
                         source_links=tuple(dict.fromkeys(links)))


def _contested_section(store, discussion_id, footnotes) -> ReportSection:
    lines = _top_position_lines(store, discussion_id, footnotes)
    linked = [cid for cid, _ in store.contested_positions(discussion_id)[:CONTESTED_LIMIT]]
    if not lines:
        return ReportSection(heading="Most contested positions",
                             body="No contested positions: no arguments recorded yet.",
                             source_links=())
    return ReportSection(heading="Most contested positions",
                         body="\n".join(lines), source_links=tuple(linked))


def _recommendation_section(store, recommendations, footnotes) -> ReportSection:
    if not recommendations:
        return ReportSection(heading="Policy recommendations",
                             body="No recommendations: cluster analysis has not run.",
                             source_links=())
    blocks = []
    links: list[str] = []
    for rec in recommendations:
        claim_bits = []
        for claim in rec.supporting_claims:
            node = store.get_contribution(claim.contribution_id)
            claim_bits.append(f'"{node.text}" {footnotes.mark(node.id)}')
            links.append(node.id)
        blocks.append(
            f"Cluster {rec.cluster_index}: {rec.key_position}\n"
            f"  Synthesis: {rec.synthesis}\n"
            f"  Supporting claims: {'; '.join(claim_bits)}")
    return ReportSection(heading="Policy recommendations",
                         body="\n".join(blocks), source_links=tuple(links))


def _stats_section(stats) -> ReportSection:
    if stats["n_contributions"] == 0:
        body = "No contributions recorded."
    else:
        body = (f"Contributions: {stats['n_contributions']}\n"
                f"Participants: {stats['n_participants']}\n"
                f"Positions with arguments: {len(stats['contested_ranking'])}")
    return ReportSection(heading="Statistics", body=body, source_links=())


def render_markdown(report: DeliberationReport, store=None) -> str:
    """Markdown export with a footnote table mapping markers to contributions."""
    out = [f"# Deliberation report ({report.style})", ""]
    out.append(f"Generated: {iso_utc(report.generated_at_ms)} | engine: {report.gateway_tag}")
    out.append("")
    for section in report.sections:
        out.append(f"## {section.heading}")
        out.append("")
        out.append(section.body)
        out.append("")
    if report.footnotes:
        out.append("## Sources")
        out.append("")
        for n, cid in enumerate(report.footnotes, start=1):
            out.append(f"[{n}] contribution:{cid}")
        out.append("")
    return "\n".join(out)
