from .classifier import RuleBasedClassifier, validate_markup
from .model import (
    COMPONENT_CLAIM,
    COMPONENT_PREMISE,
    LEGAL_TRANSITIONS,
    REL_ATTACKS,
    REL_SUPPORTS,
    SESSION_STATES,
    STATE_ANALYZED,
    STATE_APPROVED,
    STATE_MERGED,
    STATE_REJECTED,
    STATE_UNDER_REVIEW,
    STATE_UPLOADED,
    AuditEntry,
    ComponentMarkup,
    DraftIbis,
    DraftNode,
    ImportSession,
    Relation,
    Segment,
    Transcript,
)
from .workflow import (
    FOCAL_MATCH_THRESHOLD,
    MergePlan,
    apply_patch,
    approve,
    assemble_draft,
    execute_merge,
    plan_merge,
    reject,
    run_analysis,
    summarize_issue_text,
    token_jaccard,
    validate_draft,
)

__all__ = [
    "RuleBasedClassifier",
    "validate_markup",
    "Transcript",
    "Segment",
    "ComponentMarkup",
    "Relation",
    "DraftIbis",
    "DraftNode",
    "ImportSession",
    "AuditEntry",
    "SESSION_STATES",
    "LEGAL_TRANSITIONS",
    "STATE_UPLOADED",
    "STATE_ANALYZED",
    "STATE_UNDER_REVIEW",
    "STATE_APPROVED",
    "STATE_REJECTED",
    "STATE_MERGED",
    "COMPONENT_CLAIM",
    "COMPONENT_PREMISE",
    "REL_SUPPORTS",
    "REL_ATTACKS",
    "run_analysis",
    "apply_patch",
    "approve",
    "reject",
    "plan_merge",
    "execute_merge",
    "assemble_draft",
    "summarize_issue_text",
    "validate_draft",
    "token_jaccard",
    "MergePlan",
    "FOCAL_MATCH_THRESHOLD",
]
