from __future__ import annotations

import json
from pathlib import Path

import pytest

from agora.errors import CorruptLog
from agora.gateway import Gateway
from agora.jsonutil import canonical_dumps
from agora.service import EventLog, Platform, load_config

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def make_platform(data_dir, snapshot_every=1000) -> Platform:
    config = load_config(None, data_dir=str(data_dir), gateway_mode="Mock",
                         deterministic=True)
    object.__setattr__(config, "snapshot_every", snapshot_every)
    return Platform(config, Gateway(config.gateway))


def seed_records(platform: Platform, n_discussions=2, reflections=0) -> list[str]:
    ids = []
    for i in range(n_discussions):
        d = platform.create_discussion(f"D{i}", f"Question {i}?", "host")
        ids.append(d["discussion_id"])
        for j in range(3):
            platform.add_contribution(d["discussion_id"], "Position", "None",
                                      f"position {j} of {i}", f"u{j}", d["question_id"])
    if reflections:
        event_id = platform.create_event({
            "event_id": "ev1", "title": "Replay", "window_ms": 5000,
            "cards": [{"card_id": "a", "label": "A", "category": "Agree"},
                      {"card_id": "b", "label": "B", "category": "Disagree"}]})
        for t in range(reflections):
            platform.record_reflection(event_id, f"p{t}", "a" if t % 2 else "b", t * 37)
    return ids


class TestEventLog:
    def test_append_assigns_gapless_seq(self, tmp_path):
        log = EventLog(tmp_path)
        for i in range(5):
            record = log.append("test_kind", {"i": i}, ts=i)
            assert record.seq == i + 1
        log.close()
        reopened = EventLog(tmp_path)
        assert reopened.last_seq == 5
        assert [r.payload["i"] for r in reopened.records()] == list(range(5))

    def test_segment_rotation(self, tmp_path):
        from agora.service import eventlog

        original = eventlog.SEGMENT_RECORDS
        eventlog.SEGMENT_RECORDS = 10
        try:
            log = EventLog(tmp_path)
            for i in range(25):
                log.append("test_kind", {"i": i}, ts=i)
            log.close()
            segments = sorted((tmp_path / "log").glob("*.ndjson"))
            assert len(segments) == 3
            reopened = EventLog(tmp_path)
            assert reopened.last_seq == 25
        finally:
            eventlog.SEGMENT_RECORDS = original

    def test_truncated_tail_tolerated(self, tmp_path):
        log = EventLog(tmp_path)
        for i in range(100):
            log.append("test_kind", {"i": i}, ts=i)
        log.close()
        segment = sorted((tmp_path / "log").glob("*.ndjson"))[-1]
        data = segment.read_bytes()
        segment.write_bytes(data[:-17])  # tear the last record mid-line
        reopened = EventLog(tmp_path)
        assert reopened.last_seq == 99
        assert reopened.dropped_bytes > 0

    def test_mid_log_corruption_raises(self, tmp_path):
        log = EventLog(tmp_path)
        for i in range(10):
            log.append("test_kind", {"i": i}, ts=i)
        log.close()
        segment = sorted((tmp_path / "log").glob("*.ndjson"))[-1]
        lines = segment.read_bytes().splitlines(keepends=True)
        lines[4] = b'{"broken": \n'
        segment.write_bytes(b"".join(lines))
        with pytest.raises(CorruptLog):
            EventLog(tmp_path)

    def test_append_after_truncated_tail_continues_sequence(self, tmp_path):
        log = EventLog(tmp_path)
        for i in range(10):
            log.append("test_kind", {"i": i}, ts=i)
        log.close()
        segment = sorted((tmp_path / "log").glob("*.ndjson"))[-1]
        segment.write_bytes(segment.read_bytes()[:-5])
        reopened = EventLog(tmp_path)
        assert reopened.last_seq == 9
        record = reopened.append("test_kind", {"i": "next"}, ts=99)
        assert record.seq == 10


class TestCrashRecovery:
    def test_kill_after_100_records_recovers_identical_state(self, tmp_path):
        platform = make_platform(tmp_path)
        seed_records(platform, n_discussions=2, reflections=95)
        assert platform.log.last_seq >= 100
        before = canonical_dumps(platform.state.to_snapshot())
        # simulated kill: no close(), no snapshot write; reopen from disk
        recovered = make_platform(tmp_path)
        assert canonical_dumps(recovered.state.to_snapshot()) == before
        assert recovered.recovery.records_applied == recovered.log.last_seq
        recovered.close()
        platform.close()

    def test_truncated_tail_recovers_to_last_complete_record(self, tmp_path):
        platform = make_platform(tmp_path)
        seed_records(platform, n_discussions=1, reflections=20)
        last_seq = platform.log.last_seq
        platform.close()
        segment = sorted((tmp_path / "log" ).glob("*.ndjson"))[-1]
        segment.write_bytes(segment.read_bytes()[:-9])
        recovered = make_platform(tmp_path)
        assert recovered.log.last_seq == last_seq - 1
        assert recovered.recovery.dropped_bytes > 0
        assert recovered.verify()["ok"]
        recovered.close()

    def test_snapshot_plus_tail_replay(self, tmp_path):
        platform = make_platform(tmp_path, snapshot_every=10)
        seed_records(platform, n_discussions=3)
        snapshots = list((tmp_path / "snapshots").glob("*.json"))
        assert snapshots, "snapshot cadence should have produced files"
        expected = canonical_dumps(platform.state.to_snapshot())
        platform.close()
        recovered = make_platform(tmp_path, snapshot_every=10)
        assert canonical_dumps(recovered.state.to_snapshot()) == expected
        assert recovered.recovery.snapshot_seq > 0
        assert recovered.recovery.records_applied < recovered.log.last_seq
        recovered.close()

    def test_snapshot_with_empty_tail(self, tmp_path):
        platform = make_platform(tmp_path, snapshot_every=5)
        seed_records(platform, n_discussions=1)
        # append until the log length is an exact multiple of the cadence
        while platform.log.last_seq % 5 != 0:
            platform.create_discussion("pad", "pad?", "host")
        expected = canonical_dumps(platform.state.to_snapshot())
        platform.close()
        recovered = make_platform(tmp_path, snapshot_every=5)
        assert recovered.recovery.records_applied == 0  # snapshot covers everything
        assert canonical_dumps(recovered.state.to_snapshot()) == expected
        recovered.close()


class TestReplayDeterminism:
    def _pipeline(self, data_dir) -> dict:
        platform = make_platform(data_dir)
        d = platform.create_discussion("Food", "How should we eat?", "host")
        data = json.loads((FIXTURES / "transcript_food_policy.json").read_text())
        tid = platform.register_transcript(data)
        sid = platform.create_import(tid, d["discussion_id"], "curator")
        platform.analyze_import(sid, "curator")
        platform.approve_import(sid, "curator")
        platform.merge_import(sid, "curator")
        platform.refresh_recommendations(d["discussion_id"], 4)
        report_json, markdown = platform.report(d["discussion_id"], "Executive")
        platform.close()
        return {"markdown": markdown, "report": canonical_dumps(report_json)}

    def _store_bytes(self, data_dir) -> dict:
        out = {}
        for path in sorted(Path(data_dir).rglob("*")):
            if path.is_file():
                out[str(path.relative_to(data_dir))] = path.read_bytes()
        return out

    def test_two_runs_byte_identical(self, tmp_path):
        dir_a = tmp_path / "a"
        dir_b = tmp_path / "b"
        result_a = self._pipeline(dir_a)
        result_b = self._pipeline(dir_b)
        assert result_a == result_b
        assert self._store_bytes(dir_a) == self._store_bytes(dir_b)

    def test_replayed_state_is_pure_function_of_log(self, tmp_path):
        self._pipeline(tmp_path)
        first = make_platform(tmp_path)
        state_once = canonical_dumps(first.state.to_snapshot())
        first.close()
        second = make_platform(tmp_path)
        state_twice = canonical_dumps(second.state.to_snapshot())
        second.close()
        assert state_once == state_twice


class TestTruncationNormalization:
    def test_append_after_torn_tail_survives_reopen(self, tmp_path):
        """Recovery must cut the torn bytes so the next append starts a clean
        line; otherwise the new record concatenates onto the garbage and is
        lost on the following reopen."""
        log = EventLog(tmp_path)
        for i in range(10):
            log.append("test_kind", {"i": i}, ts=i)
        log.close()
        segment = sorted((tmp_path / "log").glob("*.ndjson"))[-1]
        segment.write_bytes(segment.read_bytes()[:-5])

        recovered = EventLog(tmp_path)
        assert recovered.last_seq == 9
        recovered.append("test_kind", {"i": "after-tear"}, ts=99)
        recovered.close()

        reread = EventLog(tmp_path)
        assert reread.last_seq == 10
        assert reread.records()[-1].payload == {"i": "after-tear"}
        assert reread.dropped_bytes == 0  # recovery already normalized the file

    def test_platform_keeps_writing_after_crash_with_torn_tail(self, tmp_path):
        platform = make_platform(tmp_path)
        seed_records(platform, n_discussions=1, reflections=10)
        platform.close()
        segment = sorted((tmp_path / "log").glob("*.ndjson"))[-1]
        segment.write_bytes(segment.read_bytes()[:-7])

        recovered = make_platform(tmp_path)
        dropped_seq = recovered.log.last_seq
        recovered.create_discussion("post-crash", "still writing?", "host")
        recovered.close()

        final = make_platform(tmp_path)
        assert final.log.last_seq == dropped_seq + 1  # discussion_created mints 1 record
        assert final.verify()["ok"]
        final.close()
