"""Push-notification hub.

Log records map to stream messages through a pure function, so the hub can be
rebuilt from the log on startup and a client resuming with ``last_seq=n``
sees exactly the messages it missed (at-least-once; clients dedup by seq).
Facilitator-only material (alerts, prompts) never maps to a public topic.
"""

from __future__ import annotations

import threading

from .eventlog import LogRecord


def topic_discussion(discussion_id: str) -> str:
    return f"discussion/{discussion_id}"


def topic_event(event_id: str, view: str) -> str:
    return f"event/{event_id}/{view}"


def record_messages(record: LogRecord) -> list[tuple[str, dict]]:
    kind = record.kind
    p = record.payload
    seq = record.seq
    out: list[tuple[str, dict]] = []

    def msg(topic: str, body: dict) -> None:
        out.append((topic, {"seq": seq, "kind": kind, "data": body}))

    if kind in ("import_created", "import_analyzed", "draft_edited",
                "import_approved", "import_rejected", "import_merged"):
        session_states = {"import_created": "Uploaded", "import_analyzed": "UnderReview",
                          "draft_edited": "UnderReview", "import_approved": "Approved",
                          "import_rejected": "Rejected", "import_merged": "Merged"}
        discussion_id = p.get("target_discussion_id") or p.get("discussion_id")
        body = {"session_id": p["session_id"], "state": session_states[kind]}
        if discussion_id:
            msg(topic_discussion(discussion_id), body)
    elif kind == "recommendations_distilled":
        msg(topic_discussion(p["discussion_id"]),
            {"discussion_id": p["discussion_id"], "k": p["k"],
             "count": len(p["recommendations"])})
    elif kind in ("contribution_added", "phase_advanced"):
        msg(topic_discussion(p["discussion_id"]),
            {key: p[key] for key in p if key not in ("provenance",)})
    elif kind == "alerts_detected":
        for alert in p["alerts"]:
            msg(topic_event(p["event_id"], "facilitator"), {"alert": alert})
    elif kind == "prompt_drafted":
        msg(topic_event(p["event_id"], "facilitator"), {"prompt": p["prompt"]})
    elif kind == "prompt_delivered":
        msg(topic_event(p["event_id"], "facilitator"),
            {"prompt_id": p["prompt_id"]})
    elif kind in ("live_event_created", "event_closed"):
        body = {"event_id": p["event_id"], "state": "closed" if kind == "event_closed" else "open"}
        msg(topic_event(p["event_id"], "public"), body)
        msg(topic_event(p["event_id"], "facilitator"), body)
    # reflection_recorded stays off the streams: dashboards poll snapshots
    return out


class NotificationHub:
    def __init__(self):
        self._lock = threading.Lock()
        self._topics: dict[str, list[dict]] = {}

    def publish(self, record: LogRecord) -> None:
        for topic, message in record_messages(record):
            with self._lock:
                self._topics.setdefault(topic, []).append(message)

    def rebuild(self, records) -> None:
        with self._lock:
            self._topics.clear()
        for record in records:
            self.publish(record)

    def messages(self, topic: str, after_seq: int = 0) -> list[dict]:
        with self._lock:
            return [m for m in self._topics.get(topic, ()) if m["seq"] > after_seq]

    def last_seq(self, topic: str) -> int:
        with self._lock:
            entries = self._topics.get(topic, ())
            return entries[-1]["seq"] if entries else 0
