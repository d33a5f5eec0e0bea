"""Canonical JSON helpers.

One encoding is used everywhere bytes matter: persistence records, snapshots,
report exports, fingerprints and mock digests. Keys are sorted, separators are
minimal, and non-ASCII text is preserved as UTF-8.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_dumps(obj).encode("utf-8")


def stable_hash(obj: Any, length: int = 12) -> str:
    """Hex digest of the canonical encoding, truncated to ``length`` chars."""
    return hashlib.sha256(canonical_bytes(obj)).hexdigest()[:length]


def stable_seed(obj: Any) -> int:
    """Deterministic 63-bit integer seed derived from any JSON-able value."""
    digest = hashlib.sha256(canonical_bytes(obj)).digest()
    return int.from_bytes(digest[:8], "big") >> 1
