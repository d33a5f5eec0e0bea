"""Opaque sortable identifiers.

Ids are 26-character Crockford base32 strings (48-bit millisecond timestamp +
80 bits of entropy), lexicographically sortable by creation time. Storage row
ids are never exposed.

Two factories exist: the system factory draws real time and randomness; the
deterministic factory derives both from a caller-supplied ordinal so that
replaying the same command sequence mints the same ids.
"""

from __future__ import annotations

import hashlib
import secrets
import time

_ALPHABET = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


def _encode(value: int, width: int) -> str:
    chars = []
    for _ in range(width):
        chars.append(_ALPHABET[value & 0x1F])
        value >>= 5
    return "".join(reversed(chars))


def _format_id(time_ms: int, entropy: int) -> str:
    return _encode(time_ms & ((1 << 48) - 1), 10) + _encode(entropy & ((1 << 80) - 1), 16)


class SystemIdFactory:
    """Wall-clock ids with random entropy."""

    def new_id(self) -> str:
        return _format_id(time.time_ns() // 1_000_000, secrets.randbits(80))


class DeterministicIdFactory:
    """Ids minted from a fixed ordinal base; ordinal n -> n-th id, always.

    The timestamp half encodes the ordinal so ids stay sortable in issuance
    order; the entropy half is a hash of the ordinal so ids still look opaque.
    """

    def __init__(self, base: int):
        self._next = base

    def new_id(self) -> str:
        ordinal = self._next
        self._next += 1
        digest = hashlib.sha256(b"agora-id:%d" % ordinal).digest()
        return _format_id(ordinal, int.from_bytes(digest[:10], "big"))
