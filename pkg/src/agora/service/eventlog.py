"""Append-only event log with periodic state snapshots.

Layout under the data directory:

    log/<first-seq, 8 digits>.ndjson   one canonical JSON record per line
    snapshots/<seq, 8 digits>.json     full state as of that seq

Records carry a strictly increasing gap-free ``seq``. Recovery loads the
newest readable snapshot and replays the log tail over it. A truncated final
line (torn write on crash) is tolerated: recovery stops at the last complete
record and reports how many bytes were dropped. Corruption anywhere else is
an error, never silently skipped.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from ..errors import CorruptLog
from ..jsonutil import canonical_dumps

SEGMENT_RECORDS = 2_000


@dataclass(frozen=True)
class LogRecord:
    seq: int
    kind: str
    payload: dict
    ts: int  # epoch milliseconds, UTC

    def to_line(self) -> str:
        return canonical_dumps({"kind": self.kind, "payload": self.payload,
                                "seq": self.seq, "ts": self.ts})


@dataclass
class RecoveryReport:
    snapshot_seq: int
    records_applied: int
    dropped_bytes: int
    last_seq: int


class EventLog:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.log_dir = self.data_dir / "log"
        self.snapshot_dir = self.data_dir / "snapshots"
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.snapshot_dir.mkdir(parents=True, exist_ok=True)
        self._records: list[LogRecord] = []
        self._dropped_bytes = 0
        self._handle = None
        self._segment_start = 1
        self._load_existing()

    # --- reading ---

    def _segment_files(self) -> list[Path]:
        return sorted(self.log_dir.glob("*.ndjson"))

    def _load_existing(self) -> None:
        expected_seq = 1
        files = self._segment_files()
        for index, path in enumerate(files):
            data = path.read_bytes()
            offset = 0
            while offset < len(data):
                newline = data.find(b"\n", offset)
                if newline == -1:
                    tail = len(data) - offset
                    if index == len(files) - 1:
                        self._drop_tail(path, offset, tail)  # torn final write
                        break
                    raise CorruptLog(f"unterminated record mid-log in {path.name}")
                line = data[offset:newline]
                try:
                    raw = json.loads(line)
                    record = LogRecord(seq=raw["seq"], kind=raw["kind"],
                                       payload=raw["payload"], ts=raw["ts"])
                except (ValueError, KeyError, TypeError) as exc:
                    if index == len(files) - 1 and newline + 1 >= len(data):
                        self._drop_tail(path, offset, len(data) - offset)  # corrupt final record
                        break
                    raise CorruptLog(f"unreadable record in {path.name}: {exc}") from exc
                offset = newline + 1
                if record.seq != expected_seq:
                    raise CorruptLog(
                        f"sequence gap: expected {expected_seq}, found {record.seq}")
                self._records.append(record)
                expected_seq += 1

    def _drop_tail(self, path: Path, valid_length: int, dropped: int) -> None:
        """Physically cut a torn tail so later appends start on a clean line."""
        self._dropped_bytes += dropped
        with open(path, "ab") as handle:
            handle.truncate(valid_length)

    @property
    def last_seq(self) -> int:
        return self._records[-1].seq if self._records else 0

    @property
    def next_seq(self) -> int:
        return self.last_seq + 1

    @property
    def dropped_bytes(self) -> int:
        return self._dropped_bytes

    def records(self, after_seq: int = 0) -> list[LogRecord]:
        if after_seq <= 0:
            return list(self._records)
        return [r for r in self._records if r.seq > after_seq]

    # --- writing ---

    def _open_segment(self, first_seq: int):
        if self._handle is not None:
            self._handle.close()
        self._segment_start = first_seq
        path = self.log_dir / f"{first_seq:08d}.ndjson"
        self._handle = open(path, "ab")

    def append(self, kind: str, payload: dict, ts: int) -> LogRecord:
        record = LogRecord(seq=self.next_seq, kind=kind, payload=payload, ts=ts)
        if self._handle is None or (record.seq - self._segment_start) >= SEGMENT_RECORDS:
            # continue the last on-disk segment if it still has room
            files = self._segment_files()
            if self._handle is None and files:
                last_start = int(files[-1].stem)
                if record.seq - last_start < SEGMENT_RECORDS:
                    self._segment_start = last_start
                    self._handle = open(files[-1], "ab")
                else:
                    self._open_segment(record.seq)
            else:
                self._open_segment(record.seq)
        self._handle.write(record.to_line().encode("utf-8") + b"\n")
        self._handle.flush()
        self._records.append(record)
        return record

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    # --- snapshots ---

    def write_snapshot(self, seq: int, state: dict) -> Path:
        path = self.snapshot_dir / f"{seq:08d}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(canonical_dumps({"seq": seq, "state": state}) + "\n",
                       encoding="utf-8")
        os.replace(tmp, path)
        return path

    def latest_snapshot(self) -> tuple[int, dict] | None:
        candidates = sorted(self.snapshot_dir.glob("*.json"), reverse=True)
        for path in candidates:
            try:
                raw = json.loads(path.read_text(encoding="utf-8"))
                return int(raw["seq"]), raw["state"]
            except (ValueError, KeyError):
                continue  # half-written snapshot: fall back to an older one
        return None
