"""Thematic analysis of a live transcript prefix.

In mock mode (and as the degraded fallback when the remote gateway is down)
themes come from deterministic keyword frequency: the top terms across the
prefix, each attributed to the segments mentioning it. Speaker summaries
favour the speaker's first stance-cue sentence, falling back to their most
frequent terms, and cover every speaker appearing in the prefix.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from ..errors import GatewayUnavailable
from ..transcripts.classifier import CLAIM_CUES, _sentences
from ..transcripts.model import Transcript

MAX_THEMES = 5

_WORD = re.compile(r"[a-zA-Z][a-zA-Z'-]{2,}")

_STOPWORDS = frozenset("""
the and for that this with from have has had not are is was were will would
could should can may might about into over under between against through
our your their his her its you they them then than when what which who whom
how why where all any each both more most other some such only own same very
just also been being because since therefore however but going let got get
one two three make made want need know think say said see really
""".split())


@dataclass(frozen=True)
class ThemeSummary:
    theme: str
    segment_indices: tuple[int, ...]
    segment_range: tuple[int, int]
    per_speaker_positions: dict

    def to_json(self) -> dict:
        return {
            "theme": self.theme,
            "segment_indices": list(self.segment_indices),
            "segment_range": list(self.segment_range),
            "per_speaker_positions": dict(sorted(self.per_speaker_positions.items())),
        }


@dataclass(frozen=True)
class ThemeAnalysis:
    themes: tuple[ThemeSummary, ...]
    low_fidelity: bool
    overview: str

    def to_json(self) -> dict:
        return {"themes": [t.to_json() for t in self.themes],
                "low_fidelity": self.low_fidelity, "overview": self.overview}


def _terms(text: str) -> list[str]:
    return [w.lower() for w in _WORD.findall(text) if w.lower() not in _STOPWORDS]


def _speaker_summary(transcript: Transcript, speaker: str) -> str:
    """First stance-cue sentence by the speaker, else their top terms."""
    for segment in transcript.segments:
        if segment.speaker != speaker:
            continue
        for start, end in _sentences(segment.text):
            sentence = segment.text[start:end].strip()
            if CLAIM_CUES.search(sentence):
                return sentence
    counter = Counter()
    for segment in transcript.segments:
        if segment.speaker == speaker:
            counter.update(_terms(segment.text))
    top = [term for term, _ in sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:3]]
    return " / ".join(top) if top else "(no recorded content)"


def keyword_themes(transcript: Transcript, max_themes: int = MAX_THEMES) -> tuple[ThemeSummary, ...]:
    if not transcript.segments:
        return ()
    counter = Counter()
    for segment in transcript.segments:
        counter.update(set(_terms(segment.text)))  # document frequency, not raw count
    n_themes = min(max_themes, len(transcript.segments))
    ranked = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:n_themes]

    speakers = sorted({segment.speaker for segment in transcript.segments})
    speaker_positions = {speaker: _speaker_summary(transcript, speaker) for speaker in speakers}

    themes = []
    for term, _ in ranked:
        indices = tuple(i for i, segment in enumerate(transcript.segments)
                        if term in _terms(segment.text))
        if not indices:
            continue
        themes.append(ThemeSummary(
            theme=term, segment_indices=indices,
            segment_range=(indices[0], indices[-1]),
            per_speaker_positions=speaker_positions))
    return tuple(themes)


def extract_themes(transcript: Transcript, gateway, max_themes: int = MAX_THEMES) -> ThemeAnalysis:
    if not transcript.segments:
        raise ValueError("need at least one segment to extract themes")
    themes = keyword_themes(transcript, max_themes)
    if gateway.is_mock:
        return ThemeAnalysis(themes=themes, low_fidelity=False,
                             overview=f"{len(themes)} themes by keyword frequency")
    blob = "\n".join(f"{seg.speaker}: {seg.text}" for seg in transcript.segments)
    try:
        overview = gateway.complete("theme_extraction", {"transcript": blob})
        return ThemeAnalysis(themes=themes, low_fidelity=False, overview=overview)
    except GatewayUnavailable:
        return ThemeAnalysis(themes=themes, low_fidelity=True,
                             overview="gateway unavailable; keyword-frequency themes only")
