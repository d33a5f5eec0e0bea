"""Rule-based argumentative span classifier.

A deterministic baseline standing behind the same interface as the remote
span classifier: sentences are split on terminal punctuation; a sentence (or
the part left of a discourse connective) containing a stance cue becomes a
Claim; text introduced by "because"/"since"/"as"/"therefore" becomes a
Premise supporting the nearest prior claim; text introduced by "but"/
"however" after a claim becomes an attacking Premise. The first connective
in a sentence wins.

Same transcript in, byte-identical markup out, every time.
"""

from __future__ import annotations

import re
from typing import Sequence

from ..errors import MalformedRemoteResponse
from .model import (
    COMPONENT_CLAIM,
    COMPONENT_PREMISE,
    REL_ATTACKS,
    REL_SUPPORTS,
    ComponentMarkup,
    Relation,
    Segment,
)

CLAIM_CUES = re.compile(r"\b(should|must|we need)\b", re.IGNORECASE)
SUPPORT_MARKERS = ("because", "since", "as", "therefore")
ATTACK_MARKERS = ("but", "however")
_CONNECTIVE = re.compile(
    r"\b(" + "|".join(SUPPORT_MARKERS + ATTACK_MARKERS) + r")\b", re.IGNORECASE)
_SENTENCE_END = re.compile(r"[.!?]+(?:\s+|$)")

CLAIM_CONFIDENCE = 0.9
PREMISE_CONFIDENCE = 0.8

_TRIM = " \t\n\r,;:"


def _sentences(text: str) -> list[tuple[int, int]]:
    spans = []
    start = 0
    for match in _SENTENCE_END.finditer(text):
        spans.append((start, match.start()))
        start = match.end()
    if start < len(text):
        spans.append((start, len(text)))
    return [(s, e) for s, e in spans if text[s:e].strip()]


def _trim(text: str, start: int, end: int) -> tuple[int, int]:
    while start < end and text[start] in _TRIM:
        start += 1
    while end > start and text[end - 1] in _TRIM:
        end -= 1
    return start, end


class RuleBasedClassifier:
    """Deterministic claim/premise detector used as mock and fallback."""

    def classify_segments(self, segments: Sequence[Segment]) -> list[ComponentMarkup]:
        markup: list[ComponentMarkup] = []
        last_claim_id: str | None = None

        def next_id() -> str:
            return f"m{len(markup)}"

        for seg_index, segment in enumerate(segments):
            text = segment.text
            for s_start, s_end in _sentences(text):
                sentence = text[s_start:s_end]
                connective = _CONNECTIVE.search(sentence)
                if connective is None:
                    left = _trim(text, s_start, s_end)
                    if left[0] < left[1] and CLAIM_CUES.search(text[left[0]:left[1]]):
                        markup.append(ComponentMarkup(
                            id=next_id(), segment_index=seg_index, char_range=left,
                            component=COMPONENT_CLAIM, confidence=CLAIM_CONFIDENCE))
                        last_claim_id = markup[-1].id
                    continue

                marker = connective.group(1).lower()
                left = _trim(text, s_start, s_start + connective.start())
                right = _trim(text, s_start + connective.end(), s_end)

                if left[0] < left[1] and CLAIM_CUES.search(text[left[0]:left[1]]):
                    markup.append(ComponentMarkup(
                        id=next_id(), segment_index=seg_index, char_range=left,
                        component=COMPONENT_CLAIM, confidence=CLAIM_CONFIDENCE))
                    last_claim_id = markup[-1].id

                if right[0] >= right[1]:
                    continue
                relation_type = REL_SUPPORTS if marker in SUPPORT_MARKERS else REL_ATTACKS
                relations: tuple[Relation, ...] = ()
                if last_claim_id is not None:
                    relations = (Relation(target=last_claim_id, type=relation_type),)
                markup.append(ComponentMarkup(
                    id=next_id(), segment_index=seg_index, char_range=right,
                    component=COMPONENT_PREMISE, confidence=PREMISE_CONFIDENCE,
                    relations=relations))
        return markup


def validate_markup(markup: Sequence[ComponentMarkup], segments: Sequence[Segment]) -> None:
    """Reject markup that does not fit the segments; never silently clip."""
    ids = {m.id for m in markup}
    if len(ids) != len(markup):
        raise MalformedRemoteResponse("duplicate markup ids")
    for item in markup:
        if not 0 <= item.segment_index < len(segments):
            raise MalformedRemoteResponse(
                f"markup {item.id} references segment {item.segment_index} out of range")
        start, end = item.char_range
        if not (0 <= start < end <= len(segments[item.segment_index].text)):
            raise MalformedRemoteResponse(
                f"markup {item.id} char range {item.char_range} outside segment bounds")
        for rel in item.relations:
            if rel.target not in ids:
                raise MalformedRemoteResponse(
                    f"markup {item.id} relates to unknown markup {rel.target}")
