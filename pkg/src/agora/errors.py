"""Shared exception hierarchy.

Every error carries a stable machine-readable ``code`` (used verbatim in CLI
error JSON and HTTP error bodies) and, for invariant violations, the name of
the invariant that was broken.
"""

from __future__ import annotations


class AgoraError(Exception):
    """Base class for all platform errors."""

    code = "AgoraError"
    http_status = 400
    invariant: str | None = None

    def __init__(self, message: str = "", *, invariant: str | None = None):
        super().__init__(message or self.code)
        if invariant is not None:
            self.invariant = invariant

    def to_payload(self) -> dict:
        payload = {"code": self.code, "message": str(self)}
        if self.invariant:
            payload["invariant"] = self.invariant
        return payload


# --- argument graph ---

class UnknownDiscussion(AgoraError):
    code = "UnknownDiscussion"
    http_status = 404


class UnknownContribution(AgoraError):
    code = "UnknownContribution"
    http_status = 404


class InvalidParentKind(AgoraError):
    code = "InvalidParentKind"
    http_status = 422
    invariant = "parent kind must match contribution kind (Position under Issue, Argument under Position/Argument)"


class StanceRequired(AgoraError):
    code = "StanceRequired"
    http_status = 422
    invariant = "arguments carry a Pro or Con stance; issues and positions carry none"


class DepthExceeded(AgoraError):
    code = "DepthExceeded"
    http_status = 422
    invariant = "argument nesting depth is at most 2 below a position"


class CycleDetected(AgoraError):
    code = "CycleDetected"
    http_status = 422
    invariant = "the contribution graph is a forest rooted at issues"


class PhaseViolation(AgoraError):
    code = "PhaseViolation"
    http_status = 409
    invariant = "discussion phases only advance forward (Open, Analyzing, Reporting, Closed)"


class ProvenanceIntegrityError(AgoraError):
    code = "ProvenanceIntegrityError"
    http_status = 500
    invariant = "every provenance link resolves to a stored transcript span"


# --- transcript import ---

class UnknownTranscript(AgoraError):
    code = "UnknownTranscript"
    http_status = 404


class UnknownSession(AgoraError):
    code = "UnknownSession"
    http_status = 404


class WrongState(AgoraError):
    code = "WrongState"
    http_status = 409
    invariant = "import sessions move Uploaded->Analyzed->UnderReview->{Approved,Rejected}, Approved->Merged"


class ClassifierUnavailable(AgoraError):
    code = "ClassifierUnavailable"
    http_status = 503


class PatchBreaksInvariant(AgoraError):
    code = "PatchBreaksInvariant"
    http_status = 422
    invariant = "draft edits apply atomically and must leave the draft a valid IBIS tree"


class TargetDiscussionClosed(AgoraError):
    code = "TargetDiscussionClosed"
    http_status = 409


# --- insight engine ---

class TooFewPoints(AgoraError):
    code = "TooFewPoints"
    http_status = 422


class InvalidClusterCount(AgoraError):
    code = "InvalidClusterCount"
    http_status = 422
    invariant = "cluster count k must lie in [2, 8]"


# --- policy distiller ---

class EmptyCluster(AgoraError):
    code = "EmptyCluster"
    http_status = 422


class NoPositions(AgoraError):
    code = "NoPositions"
    http_status = 422


# --- live reflection ---

class UnknownEvent(AgoraError):
    code = "UnknownEvent"
    http_status = 404


class UnknownCard(AgoraError):
    code = "UnknownCard"
    http_status = 422
    invariant = "reflection events reference a card registered in the event deck"


class EventClosed(AgoraError):
    code = "EventClosed"
    http_status = 409


class ClockSkewExceeded(AgoraError):
    code = "ClockSkewExceeded"
    http_status = 422
    invariant = "event timestamps must fall within the reorder buffer and skew allowance of the event clock"


class SeriesTooShort(AgoraError):
    code = "SeriesTooShort"
    http_status = 422


class InvalidDeck(AgoraError):
    code = "InvalidDeck"
    http_status = 422
    invariant = "decks hold 2..16 cards with unique labels"


# --- model gateway ---

class GatewayUnavailable(AgoraError):
    code = "GatewayUnavailable"
    http_status = 503


class RemoteTimeout(GatewayUnavailable):
    code = "RemoteTimeout"
    http_status = 503


class BatchTooLarge(AgoraError):
    code = "BatchTooLarge"
    http_status = 422


class UnboundSlot(AgoraError):
    code = "UnboundSlot"
    http_status = 422


class UnknownTemplate(AgoraError):
    code = "UnknownTemplate"
    http_status = 404


class MalformedRemoteResponse(AgoraError):
    code = "MalformedRemoteResponse"
    http_status = 502


# --- platform service ---

class CorruptLog(AgoraError):
    code = "CorruptLog"
    http_status = 500


class ValidationError(AgoraError):
    code = "ValidationError"
    http_status = 422
