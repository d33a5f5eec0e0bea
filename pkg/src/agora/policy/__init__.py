from .distill import (
    PolicyRecommendation,
    ProposalPitch,
    SupportingClaim,
    distill_recommendations,
    inclusion_threshold,
    issue_to_proposal,
)
from .report import (
    STYLE_ANALYTICAL,
    STYLE_EXECUTIVE,
    STYLE_NARRATIVE,
    STYLES,
    DeliberationReport,
    ReportSection,
    compute_stats,
    generate_report,
    render_markdown,
)

__all__ = [
    "PolicyRecommendation",
    "SupportingClaim",
    "ProposalPitch",
    "distill_recommendations",
    "issue_to_proposal",
    "inclusion_threshold",
    "DeliberationReport",
    "ReportSection",
    "generate_report",
    "render_markdown",
    "compute_stats",
    "STYLES",
    "STYLE_EXECUTIVE",
    "STYLE_ANALYTICAL",
    "STYLE_NARRATIVE",
]
