"""Human-in-the-loop transcript import workflow.

Three steps: automated span analysis assembles a draft IBIS tree, a curator
reviews and edits it, and an approved draft merges into the live discussion.
All functions are pure over their inputs: they return a new session (and, for
merge, an insertion plan) or raise, leaving the caller's session untouched.
This keeps every mutation replayable from the event log.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import (
    ClassifierUnavailable,
    GatewayUnavailable,
    PatchBreaksInvariant,
    TargetDiscussionClosed,
    WrongState,
)
from ..graph.model import (
    KIND_ARGUMENT,
    KIND_ISSUE,
    KIND_POSITION,
    MAX_ARGUMENT_DEPTH,
    PHASE_CLOSED,
    SOURCE_TRANSCRIPT,
    STANCE_CON,
    STANCE_NONE,
    STANCE_PRO,
    Provenance,
)
from .classifier import validate_markup
from .model import (
    COMPONENT_CLAIM,
    LEGAL_TRANSITIONS,
    REL_ATTACKS,
    STATE_ANALYZED,
    STATE_APPROVED,
    STATE_MERGED,
    STATE_REJECTED,
    STATE_UNDER_REVIEW,
    STATE_UPLOADED,
    ComponentMarkup,
    DraftIbis,
    DraftNode,
    ImportSession,
    Transcript,
)

# An imported issue threads into the existing focal question instead of
# duplicating it when token overlap reaches this level.
FOCAL_MATCH_THRESHOLD = 0.9

_WORD = re.compile(r"\w+", re.UNICODE)


def _require_state(session: ImportSession, expected: str) -> None:
    if session.state != expected:
        raise WrongState(f"session {session.id} is {session.state}, expected {expected}")


def _step(session: ImportSession, to_state: str) -> str:
    if (session.state, to_state) not in LEGAL_TRANSITIONS:
        raise WrongState(f"illegal transition {session.state} -> {to_state}")
    return to_state


def token_jaccard(a: str, b: str) -> float:
    """Case-folded token overlap used by the focal-question threading rule."""
    tokens_a = set(_WORD.findall(a.casefold()))
    tokens_b = set(_WORD.findall(b.casefold()))
    if not tokens_a and not tokens_b:
        return 1.0
    union = tokens_a | tokens_b
    return len(tokens_a & tokens_b) / len(union)


# --- step 1: analysis ---

def summarize_issue_text(transcript: Transcript, gateway) -> str:
    """Working-issue text: gateway summary of the opening turn, else the event title."""
    first_turn = next((seg.text for seg in transcript.segments if seg.text.strip()), "")
    if gateway is not None and first_turn:
        try:
            return gateway.complete("issue_summary", {
                "event_title": transcript.event_title,
                "first_turn": first_turn,
            })
        except GatewayUnavailable:
            pass
    return transcript.event_title


def assemble_draft(transcript: Transcript, markup: list[ComponentMarkup],
                   session_id: str, issue_text: str) -> DraftIbis:
    """Deterministic markup -> IBIS mapping.

    Claims become position candidates under the working issue; premises
    become pro/con arguments under the position of the claim they relate to;
    unrelated premises fall back to the nearest preceding claim.
    """
    nodes: list[DraftNode] = []
    warnings: list[str] = []

    anchor_index = next((i for i, seg in enumerate(transcript.segments) if seg.text.strip()), None)
    if anchor_index is None:
        warnings.append("transcript has no non-empty segments; draft is empty")
        return DraftIbis(nodes=(), warnings=tuple(warnings))

    def provenance(seg_index: int, char_range: tuple[int, int]) -> Provenance:
        return Provenance(source=SOURCE_TRANSCRIPT, transcript_id=transcript.id,
                          segment_index=seg_index, char_range=char_range,
                          import_session_id=session_id)

    anchor_segment = transcript.segments[anchor_index]
    issue = DraftNode(
        id="n0", kind=KIND_ISSUE, stance=STANCE_NONE, text=issue_text,
        author=anchor_segment.speaker, parent=None,
        provenance=provenance(anchor_index, (0, len(anchor_segment.text))),
    )
    nodes.append(issue)

    position_for_claim: dict[str, str] = {}
    last_position_id: str | None = None
    for item in markup:
        segment = transcript.segments[item.segment_index]
        span_text = segment.text[item.char_range[0]:item.char_range[1]]
        node_id = f"n{len(nodes)}"
        if item.component == COMPONENT_CLAIM:
            nodes.append(DraftNode(
                id=node_id, kind=KIND_POSITION, stance=STANCE_NONE, text=span_text,
                author=segment.speaker, parent=issue.id,
                provenance=provenance(item.segment_index, item.char_range)))
            position_for_claim[item.id] = node_id
            last_position_id = node_id
        else:
            if item.relations:
                relation = item.relations[0]
                parent = position_for_claim.get(relation.target)
                stance = STANCE_CON if relation.type == REL_ATTACKS else STANCE_PRO
            else:
                parent = last_position_id
                stance = STANCE_PRO
            if parent is None:
                warnings.append(
                    f"premise at segment {item.segment_index} {list(item.char_range)} "
                    "has no preceding claim; skipped")
                continue
            nodes.append(DraftNode(
                id=node_id, kind=KIND_ARGUMENT, stance=stance, text=span_text,
                author=segment.speaker, parent=parent,
                provenance=provenance(item.segment_index, item.char_range)))
    return DraftIbis(nodes=tuple(nodes), warnings=tuple(warnings))


def run_analysis(session: ImportSession, transcript: Transcript, classifier,
                 gateway, now_ms: int, actor: str) -> ImportSession:
    """Uploaded -> Analyzed -> UnderReview. Failure leaves the session Uploaded."""
    _require_state(session, STATE_UPLOADED)
    try:
        markup = classifier.classify_segments(transcript.segments)
        validate_markup(markup, transcript.segments)
    except Exception as exc:
        raise ClassifierUnavailable(f"span classification failed: {exc}") from exc

    issue_text = summarize_issue_text(transcript, gateway) if transcript.segments else ""
    draft = assemble_draft(transcript, markup, session.id, issue_text)

    state = _step(session, STATE_ANALYZED)
    audit = session.audited(actor, "analyzed", now_ms,
                            nodes=len(draft.nodes), warnings=list(draft.warnings))
    session = session.with_changes(state=state, draft=draft, audit=audit)
    state = _step(session, STATE_UNDER_REVIEW)
    return session.with_changes(
        state=state, audit=session.audited(actor, "review_started", now_ms))


# --- step 2: curator review ---

def validate_draft(draft: DraftIbis, transcript: Transcript) -> None:
    """Full invariant check of a draft tree; raises PatchBreaksInvariant."""
    by_id = {}
    for node in draft.nodes:
        if node.id in by_id:
            raise PatchBreaksInvariant(f"duplicate draft node id {node.id}")
        by_id[node.id] = node

    for node in draft.nodes:
        if not node.text or not node.text.strip():
            raise PatchBreaksInvariant(f"node {node.id} has empty text")
        prov = node.provenance
        if prov.source != SOURCE_TRANSCRIPT:
            raise PatchBreaksInvariant(f"node {node.id} lacks transcript provenance")
        if prov.transcript_id != transcript.id:
            raise PatchBreaksInvariant(f"node {node.id} references a different transcript")
        if not 0 <= prov.segment_index < len(transcript.segments):
            raise PatchBreaksInvariant(f"node {node.id} provenance segment out of range")
        start, end = prov.char_range
        if not (0 <= start < end <= len(transcript.segments[prov.segment_index].text)):
            raise PatchBreaksInvariant(f"node {node.id} provenance char range out of bounds")

        parent = by_id.get(node.parent) if node.parent else None
        if node.parent and parent is None:
            raise PatchBreaksInvariant(f"node {node.id} parent {node.parent} missing")
        if node.kind == KIND_ISSUE:
            if parent is not None or node.stance != STANCE_NONE:
                raise PatchBreaksInvariant(f"issue {node.id} must be a stanceless root")
        elif node.kind == KIND_POSITION:
            if parent is None or parent.kind != KIND_ISSUE or node.stance != STANCE_NONE:
                raise PatchBreaksInvariant(f"position {node.id} must sit under an issue, stanceless")
        elif node.kind == KIND_ARGUMENT:
            if parent is None or parent.kind not in (KIND_POSITION, KIND_ARGUMENT):
                raise PatchBreaksInvariant(f"argument {node.id} must sit under a position or argument")
            if node.stance not in (STANCE_PRO, STANCE_CON):
                raise PatchBreaksInvariant(f"argument {node.id} requires a Pro or Con stance")
        else:
            raise PatchBreaksInvariant(f"node {node.id} has unknown kind {node.kind}")

        # cycle and depth checks walking up
        depth = 0
        current = node
        seen = set()
        while current.parent is not None:
            if current.id in seen:
                raise PatchBreaksInvariant(f"cycle detected at node {current.id}")
            seen.add(current.id)
            if current.kind == KIND_ARGUMENT:
                depth += 1
            current = by_id.get(current.parent)
            if current is None:
                raise PatchBreaksInvariant(f"broken parent chain near {node.id}")
        if current.kind != KIND_ISSUE:
            raise PatchBreaksInvariant(f"node {node.id} does not root at an issue")
        if depth > MAX_ARGUMENT_DEPTH:
            raise PatchBreaksInvariant(
                f"node {node.id} nests {depth} levels of argument (max {MAX_ARGUMENT_DEPTH})")


def _delete_subtree(nodes: list[DraftNode], root_id: str) -> tuple[list[DraftNode], int]:
    children: dict[str, list[str]] = {}
    for node in nodes:
        if node.parent:
            children.setdefault(node.parent, []).append(node.id)
    doomed = set()
    stack = [root_id]
    while stack:
        current = stack.pop()
        if current in doomed:  # earlier ops may have left a cycle; don't loop on it
            continue
        doomed.add(current)
        stack.extend(children.get(current, ()))
    return [n for n in nodes if n.id not in doomed], len(doomed)


def apply_patch(session: ImportSession, transcript: Transcript, actor: str,
                patch: list[dict], now_ms: int) -> ImportSession:
    """Apply curator node operations atomically; any violation rolls back all."""
    _require_state(session, STATE_UNDER_REVIEW)
    nodes = list(session.draft.nodes)
    removed_total = 0
    inserted = 0

    def locate(node_id: str) -> int:
        for idx, node in enumerate(nodes):
            if node.id == node_id:
                return idx
        raise PatchBreaksInvariant(f"patch references unknown node {node_id}")

    from dataclasses import replace as _replace
    for op in patch:
        name = op.get("op")
        if name == "retype":
            idx = locate(op["node"])
            stance = op.get("stance", nodes[idx].stance)
            nodes[idx] = _replace(nodes[idx], kind=op.get("kind", nodes[idx].kind), stance=stance)
        elif name == "retext":
            idx = locate(op["node"])
            nodes[idx] = _replace(nodes[idx], text=op["text"])
        elif name == "reparent":
            idx = locate(op["node"])
            nodes[idx] = _replace(nodes[idx], parent=op.get("parent"))
        elif name == "delete":
            locate(op["node"])
            nodes, removed = _delete_subtree(nodes, op["node"])
            removed_total += removed
        elif name == "insert":
            try:
                raw = dict(op["node"])
                raw.setdefault("id", f"n{sum(1 for _ in nodes) + removed_total + inserted}")
                node = DraftNode.from_json(raw)
            except (KeyError, TypeError, AttributeError) as exc:
                raise PatchBreaksInvariant(f"malformed insert payload: {exc}") from exc
            nodes.append(node)
            inserted += 1
        else:
            raise PatchBreaksInvariant(f"unknown patch operation '{name}'")

    draft = DraftIbis(nodes=tuple(nodes), warnings=session.draft.warnings)
    validate_draft(draft, transcript)
    audit = session.audited(actor, "edited", now_ms,
                            ops=len(patch), removed=removed_total, inserted=inserted)
    return session.with_changes(draft=draft, audit=audit)


def approve(session: ImportSession, actor: str, now_ms: int) -> ImportSession:
    state = _step(session, STATE_APPROVED)
    return session.with_changes(state=state, audit=session.audited(actor, "approved", now_ms))


def reject(session: ImportSession, actor: str, reason: str, now_ms: int) -> ImportSession:
    state = _step(session, STATE_REJECTED)
    return session.with_changes(state=state, reject_reason=reason,
                                audit=session.audited(actor, "rejected", now_ms, reason=reason))


# --- step 3: merge ---

@dataclass(frozen=True)
class PlannedInsert:
    draft_id: str
    contribution_id: str
    kind: str
    stance: str
    text: str
    author: str
    parent: str  # contribution id in the target discussion
    provenance: Provenance


@dataclass(frozen=True)
class MergePlan:
    inserts: tuple[PlannedInsert, ...]
    mapping: dict  # draft node id -> contribution id (threaded issues map to the focal question)


def plan_merge(session: ImportSession, store, new_ids: list[str]) -> MergePlan:
    """Decide, node by node, where the approved draft lands in the discussion.

    Issues whose text matches the focal question (token Jaccard >=
    FOCAL_MATCH_THRESHOLD) thread into it; everything else inserts as new
    contributions in topological order. ``new_ids`` supplies one fresh
    contribution id per draft node (threaded issues consume one slot too so
    the mapping stays 1:1 with draft nodes).
    """
    _require_state(session, STATE_APPROVED)
    discussion = store.get_discussion(session.target_discussion_id)
    if discussion.phase == PHASE_CLOSED:
        raise TargetDiscussionClosed(f"discussion {discussion.id} is closed")
    focal = store.get_contribution(discussion.focal_question)

    nodes = list(session.draft.nodes)
    if len(new_ids) < len(nodes):
        raise ValueError("plan_merge needs one candidate id per draft node")

    # topological order: parents first
    ordered: list[DraftNode] = []
    placed: set[str] = set()
    pending = nodes
    while pending:
        progress = [n for n in pending if n.parent is None or n.parent in placed]
        if not progress:
            raise PatchBreaksInvariant("draft contains unresolvable parent references")
        for node in progress:
            ordered.append(node)
            placed.add(node.id)
        pending = [n for n in pending if n.id not in placed]

    mapping: dict[str, str] = {}
    inserts: list[PlannedInsert] = []
    for node, candidate_id in zip(ordered, new_ids):
        if node.kind == KIND_ISSUE and token_jaccard(node.text, focal.text) >= FOCAL_MATCH_THRESHOLD:
            mapping[node.id] = focal.id  # thread, do not duplicate
            continue
        parent_contribution = mapping[node.parent] if node.parent else None
        if node.kind != KIND_ISSUE and parent_contribution is None:
            raise PatchBreaksInvariant(f"draft node {node.id} has no mergeable parent")
        mapping[node.id] = candidate_id
        inserts.append(PlannedInsert(
            draft_id=node.id, contribution_id=candidate_id, kind=node.kind,
            stance=node.stance, text=node.text, author=node.author,
            parent=parent_contribution, provenance=node.provenance))
    return MergePlan(inserts=tuple(inserts), mapping=mapping)


def execute_merge(session: ImportSession, store, plan: MergePlan,
                  actor: str, now_ms: int) -> tuple[ImportSession, list[str]]:
    """Insert the planned nodes and seal the session as Merged."""
    _require_state(session, STATE_APPROVED)
    for insert in plan.inserts:
        store.add_contribution(
            session.target_discussion_id, insert.kind, insert.stance, insert.text,
            insert.author, insert.parent, insert.provenance,
            contribution_id=insert.contribution_id, created_at_ms=now_ms, via_merge=True)
    state = _step(session, STATE_MERGED)
    audit = session.audited(actor, "merged", now_ms, inserted=len(plan.inserts))
    merged = session.with_changes(state=state, audit=audit, merged_ids=dict(plan.mapping))
    ordered_ids = [plan.mapping[node.id] for node in session.draft.nodes]
    return merged, ordered_ids
