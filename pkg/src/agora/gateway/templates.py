"""Versioned prompt templates.

Templates live as files named ``<name>@<semver>.txt`` next to this module so
that report reproducibility survives prompt edits: a rendered prompt always
records which template version produced it. Slot placeholders use single
braces, e.g. ``{segment_text}``. Rendering is a single pass, so slot values
are inserted verbatim and can never themselves be expanded (no injection).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from ..errors import UnboundSlot, UnknownTemplate

_SLOT_RE = re.compile(r"\{([a-z][a-z0-9_]*)\}")


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    version: str
    body: str

    @property
    def slots(self) -> tuple[str, ...]:
        seen: list[str] = []
        for match in _SLOT_RE.finditer(self.body):
            if match.group(1) not in seen:
                seen.append(match.group(1))
        return tuple(seen)

    def render(self, bindings: dict[str, str]) -> str:
        missing = [slot for slot in self.slots if slot not in bindings]
        if missing:
            raise UnboundSlot(f"template '{self.name}' missing slots: {', '.join(missing)}")

        def substitute(match: re.Match) -> str:
            return str(bindings[match.group(1)])

        return _SLOT_RE.sub(substitute, self.body)


def _version_key(version: str) -> tuple[int, ...]:
    return tuple(int(part) for part in version.split("."))


def load_templates() -> dict[str, PromptTemplate]:
    """Load the highest version of every bundled template."""
    best: dict[str, PromptTemplate] = {}
    root = resources.files(__package__) / "templates"
    for entry in root.iterdir():
        if not entry.name.endswith(".txt") or "@" not in entry.name:
            continue
        name, _, version = entry.name[: -len(".txt")].partition("@")
        template = PromptTemplate(name=name, version=version, body=entry.read_text(encoding="utf-8"))
        current = best.get(name)
        if current is None or _version_key(version) > _version_key(current.version):
            best[name] = template
    return best


class TemplateSet:
    def __init__(self, templates: dict[str, PromptTemplate] | None = None):
        self._templates = templates if templates is not None else load_templates()

    def get(self, name: str) -> PromptTemplate:
        try:
            return self._templates[name]
        except KeyError:
            raise UnknownTemplate(f"no prompt template named '{name}'") from None

    def names(self) -> list[str]:
        return sorted(self._templates)
