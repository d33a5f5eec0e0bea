from .analytics import (
    DEFAULT_BASELINE_N,
    DEFAULT_WINDOW_MS,
    DEFAULT_Z_THRESHOLD,
    SIGMA_FLOOR,
    aggregate,
    detect_spikes,
)
from .live import (
    REORDER_BUFFER_MS,
    SKEW_ALLOWANCE_MS,
    STATUS_ACCEPTED,
    STATUS_DUPLICATE,
    LiveEvent,
    RecordOutcome,
)
from .model import (
    CATEGORIES,
    CATEGORY_AGREE,
    CATEGORY_CUSTOM,
    CATEGORY_DISAGREE,
    CATEGORY_EMOTION,
    PROMPT_CLARIFYING,
    PROMPT_KINDS,
    PROMPT_OPEN,
    PROMPT_PROVOCATIVE,
    Card,
    EngagementSeries,
    FacilitatorPrompt,
    ReflectionDeck,
    ReflectionEvent,
    SpikeAlert,
)
from .prompts import generate_prompt, prompt_kind_for
from .themes import ThemeAnalysis, ThemeSummary, extract_themes, keyword_themes

__all__ = [
    "LiveEvent",
    "RecordOutcome",
    "STATUS_ACCEPTED",
    "STATUS_DUPLICATE",
    "REORDER_BUFFER_MS",
    "SKEW_ALLOWANCE_MS",
    "aggregate",
    "detect_spikes",
    "DEFAULT_WINDOW_MS",
    "DEFAULT_BASELINE_N",
    "DEFAULT_Z_THRESHOLD",
    "SIGMA_FLOOR",
    "Card",
    "ReflectionDeck",
    "ReflectionEvent",
    "EngagementSeries",
    "SpikeAlert",
    "FacilitatorPrompt",
    "CATEGORIES",
    "CATEGORY_AGREE",
    "CATEGORY_DISAGREE",
    "CATEGORY_EMOTION",
    "CATEGORY_CUSTOM",
    "PROMPT_KINDS",
    "PROMPT_OPEN",
    "PROMPT_CLARIFYING",
    "PROMPT_PROVOCATIVE",
    "generate_prompt",
    "prompt_kind_for",
    "extract_themes",
    "keyword_themes",
    "ThemeAnalysis",
    "ThemeSummary",
]
