from .model import (
    KIND_ARGUMENT,
    KIND_ISSUE,
    KIND_POSITION,
    MAX_ARGUMENT_DEPTH,
    PHASE_ANALYZING,
    PHASE_CLOSED,
    PHASE_OPEN,
    PHASE_REPORTING,
    PHASES,
    SOURCE_ONLINE,
    SOURCE_TRANSCRIPT,
    STANCE_CON,
    STANCE_NONE,
    STANCE_PRO,
    Contribution,
    Discussion,
    Provenance,
)
from .store import DiscussionStore, ProvenanceLink, ProvenanceResolver

__all__ = [
    "Contribution",
    "Discussion",
    "Provenance",
    "DiscussionStore",
    "ProvenanceLink",
    "ProvenanceResolver",
    "KIND_ISSUE",
    "KIND_POSITION",
    "KIND_ARGUMENT",
    "STANCE_PRO",
    "STANCE_CON",
    "STANCE_NONE",
    "PHASE_OPEN",
    "PHASE_ANALYZING",
    "PHASE_REPORTING",
    "PHASE_CLOSED",
    "PHASES",
    "SOURCE_ONLINE",
    "SOURCE_TRANSCRIPT",
    "MAX_ARGUMENT_DEPTH",
]
