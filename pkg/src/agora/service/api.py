"""HTTP surface: ingestion endpoints, analytics reads, push streams.

Payloads are JSON. Invariant violations map to 422 with the violated
invariant named in the body; state-machine misuse maps to 409; missing
resources to 404; the access matrix yields 401/403. Streams speak a
line-delimited push protocol (one JSON message per line, seq-tagged) and
resume from ``?last_seq=``.
"""

from __future__ import annotations

import asyncio
import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from ..errors import AgoraError, InvalidClusterCount, ValidationError
from ..insight import K_MAX, K_MIN
from .auth import Principal, TokenAuthenticator
from .hub import topic_discussion, topic_event
from .platform import Platform

STREAM_POLL_SECONDS = 0.05
STREAM_HEARTBEAT_SECONDS = 10.0


def _error_response(exc: AgoraError) -> JSONResponse:
    return JSONResponse(status_code=exc.http_status, content={"error": exc.to_payload()})


def _deny(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": "AccessDenied" if status == 403 else "Unauthorized",
                                           "message": message}})


def create_app(platform: Platform, authenticator: TokenAuthenticator) -> FastAPI:
    app = FastAPI(title="agora deliberation service", version="0.1.0")
    app.state.platform = platform

    @app.exception_handler(AgoraError)
    async def agora_error_handler(request: Request, exc: AgoraError):
        return _error_response(exc)

    def principal_of(request: Request) -> Principal | None:
        header = request.headers.get("authorization", "")
        token = header[7:] if header.lower().startswith("bearer ") else None
        token = token or request.query_params.get("token")
        return authenticator.authenticate(token)

    def gate(request: Request, capability: str, resource_id: str | None = None):
        principal = principal_of(request)
        if principal is None:
            return None, _deny(401, "missing or unknown bearer token")
        if not principal.allows(capability, resource_id):
            return None, _deny(403, f"role {principal.role} may not {capability}")
        return principal, None

    async def body_of(request: Request) -> dict:
        try:
            data = json.loads(await request.body() or b"{}")
        except ValueError as exc:
            raise ValidationError(f"malformed JSON body: {exc}") from exc
        if not isinstance(data, dict):
            raise ValidationError("JSON body must be an object")
        return data

    # --- discussions ---

    @app.post("/discussions")
    async def create_discussion(request: Request):
        _, err = gate(request, "contribute")
        if err:
            return err
        body = await body_of(request)
        return platform.create_discussion(
            str(body.get("title", "")), str(body.get("question", "")),
            str(body.get("author", "anonymous")))

    @app.get("/discussions")
    async def list_discussions(request: Request):
        _, err = gate(request, "read_public")
        if err:
            return err
        store = platform.state.store
        return {"discussions": [store.get_discussion(d).to_json()
                                for d in store.discussion_ids()]}

    @app.get("/discussions/{discussion_id}")
    async def get_discussion(discussion_id: str, request: Request):
        _, err = gate(request, "read_public", discussion_id)
        if err:
            return err
        return platform.discussion_view(discussion_id)

    @app.post("/discussions/{discussion_id}/contributions")
    async def add_contribution(discussion_id: str, request: Request):
        _, err = gate(request, "contribute", discussion_id)
        if err:
            return err
        body = await body_of(request)
        cid = platform.add_contribution(
            discussion_id, str(body.get("kind", "")), str(body.get("stance", "None")),
            str(body.get("text", "")), str(body.get("author", "anonymous")),
            body.get("parent"), body.get("provenance"))
        return {"contribution_id": cid}

    @app.post("/contributions/{contribution_id}/endorse")
    async def endorse(contribution_id: str, request: Request):
        _, err = gate(request, "contribute")
        if err:
            return err
        body = await body_of(request)
        count = platform.endorse(contribution_id, str(body.get("participant", "anonymous")))
        return {"contribution_id": contribution_id, "endorsements": count}

    @app.post("/discussions/{discussion_id}/phase")
    async def advance_phase(discussion_id: str, request: Request):
        _, err = gate(request, "admin", discussion_id)
        if err:
            return err
        body = await body_of(request)
        platform.advance_phase(discussion_id, str(body.get("phase", "")))
        return {"discussion_id": discussion_id,
                "phase": platform.state.store.get_discussion(discussion_id).phase}

    # --- transcripts and imports ---

    @app.post("/transcripts")
    async def upload_transcript(request: Request):
        _, err = gate(request, "imports")
        if err:
            return err
        body = await body_of(request)
        return {"transcript_id": platform.register_transcript(body)}

    @app.get("/transcripts/{transcript_id}")
    async def get_transcript(transcript_id: str, request: Request):
        _, err = gate(request, "read_public")
        if err:
            return err
        return platform.state.require_transcript(transcript_id).to_json()

    @app.post("/imports")
    async def create_import(request: Request):
        principal, err = gate(request, "imports")
        if err:
            return err
        body = await body_of(request)
        session_id = platform.create_import(
            str(body.get("transcript_id", "")), str(body.get("discussion_id", "")),
            str(body.get("actor", principal.role)))
        return {"session_id": session_id}

    @app.get("/imports/{session_id}")
    async def get_import(session_id: str, request: Request):
        _, err = gate(request, "imports")
        if err:
            return err
        return platform.state.require_session(session_id).to_json()

    @app.post("/imports/{session_id}/analyze")
    async def analyze_import(session_id: str, request: Request):
        principal, err = gate(request, "imports")
        if err:
            return err
        body = await body_of(request)
        return platform.analyze_import(session_id, str(body.get("actor", principal.role)))

    @app.post("/imports/{session_id}/edit")
    async def edit_import(session_id: str, request: Request):
        principal, err = gate(request, "imports")
        if err:
            return err
        body = await body_of(request)
        patch = body.get("patch", [])
        if not isinstance(patch, list):
            raise ValidationError("patch must be a list of node operations")
        return platform.edit_import(session_id, str(body.get("actor", principal.role)), patch)

    @app.post("/imports/{session_id}/approve")
    async def approve_import(session_id: str, request: Request):
        principal, err = gate(request, "imports")
        if err:
            return err
        body = await body_of(request)
        return platform.approve_import(session_id, str(body.get("actor", principal.role)))

    @app.post("/imports/{session_id}/reject")
    async def reject_import(session_id: str, request: Request):
        principal, err = gate(request, "imports")
        if err:
            return err
        body = await body_of(request)
        return platform.reject_import(session_id, str(body.get("actor", principal.role)),
                                      str(body.get("reason", "unspecified")))

    @app.post("/imports/{session_id}/merge")
    async def merge_import(session_id: str, request: Request):
        principal, err = gate(request, "imports")
        if err:
            return err
        body = await body_of(request)
        ids = platform.merge_import(session_id, str(body.get("actor", principal.role)))
        return {"contribution_ids": ids}

    # --- analytics ---

    def _parse_k(request: Request) -> int:
        raw = request.query_params.get("k", "4")
        try:
            k = int(raw)
        except ValueError:
            raise InvalidClusterCount(f"k must be an integer in [{K_MIN}, {K_MAX}]") from None
        if not K_MIN <= k <= K_MAX:
            raise InvalidClusterCount(f"k={k} outside [{K_MIN}, {K_MAX}]")
        return k

    @app.get("/discussions/{discussion_id}/analytics/clusters")
    async def analytics_clusters(discussion_id: str, request: Request):
        _, err = gate(request, "read_public", discussion_id)
        if err:
            return err
        return platform.clusters_payload(discussion_id, _parse_k(request))

    @app.get("/discussions/{discussion_id}/analytics/thememap")
    async def analytics_thememap(discussion_id: str, request: Request):
        _, err = gate(request, "read_public", discussion_id)
        if err:
            return err
        return platform.thememap_payload(discussion_id)

    @app.get("/discussions/{discussion_id}/analytics/contested")
    async def analytics_contested(discussion_id: str, request: Request):
        _, err = gate(request, "read_public", discussion_id)
        if err:
            return err
        return platform.contested_payload(discussion_id)

    @app.get("/discussions/{discussion_id}/recommendations")
    async def recommendations(discussion_id: str, request: Request):
        _, err = gate(request, "read_public", discussion_id)
        if err:
            return err
        k = _parse_k(request) if "k" in request.query_params else None
        return platform.recommendations_payload(discussion_id, k)

    @app.post("/discussions/{discussion_id}/recommendations/refresh")
    async def refresh_recommendations(discussion_id: str, request: Request):
        _, err = gate(request, "analytics_refresh", discussion_id)
        if err:
            return err
        return platform.refresh_recommendations(discussion_id, _parse_k(request))

    @app.get("/discussions/{discussion_id}/report")
    async def report(discussion_id: str, request: Request):
        _, err = gate(request, "read_public", discussion_id)
        if err:
            return err
        style = request.query_params.get("style", "Executive")
        report_json, markdown = platform.report(discussion_id, style)
        if request.query_params.get("format") == "markdown":
            return StreamingResponse(iter([markdown]), media_type="text/markdown")
        return {"report": report_json, "markdown": markdown}

    # --- live events ---

    @app.post("/events")
    async def create_event(request: Request):
        _, err = gate(request, "facilitate")
        if err:
            return err
        body = await body_of(request)
        if "cards" not in body:
            raise ValidationError("event payload requires a card deck")
        return {"event_id": platform.create_event(body)}

    @app.get("/events/{event_id}")
    async def get_event(event_id: str, request: Request):
        _, err = gate(request, "read_public", event_id)
        if err:
            return err
        event = platform.state.require_event(event_id)
        meta = platform.state.event_meta[event_id]
        return {"event_id": event_id, "title": meta["title"], "closed": event.closed,
                "clock_ms": event.clock_ms, "deck": event.deck.to_json(),
                "window_ms": meta["window_ms"]}

    @app.post("/events/{event_id}/reflections")
    async def record_reflection(event_id: str, request: Request):
        _, err = gate(request, "reflect", event_id)
        if err:
            return err
        raw = await request.body()
        try:
            body = json.loads(raw)
        except ValueError as exc:
            raise ValidationError(f"malformed JSON body: {exc}") from exc
        if isinstance(body, dict):
            events = [body]
        elif isinstance(body, list):
            events = body  # batch replay convenience; same wire schema per item
        else:
            raise ValidationError("reflection body must be an object or list of objects")
        results = []
        for e in events:
            try:
                t_ms = int(e.get("t_ms"))
            except (TypeError, ValueError):
                raise ValidationError("t_ms must be an integer number of milliseconds") from None
            results.append(platform.record_reflection(
                event_id, str(e.get("participant", "")), str(e.get("card_id", "")), t_ms))
        # hot path: skip fastapi's jsonable_encoder round trip
        return JSONResponse(results[0] if isinstance(body, dict) else {"results": results})

    @app.post("/events/{event_id}/transcript")
    async def attach_transcript(event_id: str, request: Request):
        _, err = gate(request, "facilitate", event_id)
        if err:
            return err
        body = await body_of(request)
        platform.attach_event_transcript(event_id, str(body.get("transcript_id", "")))
        return {"event_id": event_id, "transcript_id": body.get("transcript_id")}

    @app.post("/events/{event_id}/clock")
    async def advance_clock(event_id: str, request: Request):
        _, err = gate(request, "facilitate", event_id)
        if err:
            return err
        body = await body_of(request)
        platform.advance_event_clock(event_id, int(body.get("now_ms", 0)))
        return {"event_id": event_id, "clock_ms": platform.state.require_event(event_id).clock_ms}

    @app.post("/events/{event_id}/close")
    async def close_event(event_id: str, request: Request):
        _, err = gate(request, "facilitate", event_id)
        if err:
            return err
        platform.close_event(event_id)
        return {"event_id": event_id, "closed": True}

    @app.post("/events/{event_id}/detect")
    async def detect(event_id: str, request: Request):
        _, err = gate(request, "facilitate", event_id)
        if err:
            return err
        drafted = platform.run_detection(event_id)
        return {"event_id": event_id, "new_prompts": drafted}

    @app.post("/events/{event_id}/prompts/{prompt_id}/delivered")
    async def deliver_prompt(event_id: str, prompt_id: str, request: Request):
        _, err = gate(request, "facilitate", event_id)
        if err:
            return err
        platform.deliver_prompt(event_id, prompt_id, "facilitator")
        return {"event_id": event_id, "prompt_id": prompt_id, "delivered": True}

    @app.get("/events/{event_id}/snapshot/public")
    async def snapshot_public(event_id: str, request: Request):
        _, err = gate(request, "read_public", event_id)
        if err:
            return err
        return platform.snapshot_public(event_id)

    @app.get("/events/{event_id}/snapshot/facilitator")
    async def snapshot_facilitator(event_id: str, request: Request):
        _, err = gate(request, "facilitate", event_id)
        if err:
            return err
        return platform.snapshot_facilitator(event_id)

    # --- streams ---

    async def _stream(request: Request, topic: str):
        last_seq = int(request.query_params.get("last_seq", "0"))
        # bounded lifetime for in-process clients and polling consumers;
        # 0 means stream until the client disconnects
        timeout_s = float(request.query_params.get("timeout_s", "0"))

        async def generate():
            cursor = last_seq
            idle = 0.0
            elapsed = 0.0
            while True:
                if await request.is_disconnected():
                    return
                messages = platform.hub.messages(topic, after_seq=cursor)
                if messages:
                    idle = 0.0
                    for message in messages:
                        cursor = max(cursor, message["seq"])
                        yield json.dumps(message, sort_keys=True) + "\n"
                else:
                    idle += STREAM_POLL_SECONDS
                    if idle >= STREAM_HEARTBEAT_SECONDS:
                        idle = 0.0
                        yield json.dumps({"kind": "heartbeat", "seq": cursor}) + "\n"
                    await asyncio.sleep(STREAM_POLL_SECONDS)
                    elapsed += STREAM_POLL_SECONDS
                if timeout_s and elapsed >= timeout_s:
                    return

        return StreamingResponse(generate(), media_type="application/x-ndjson")

    @app.get("/discussions/{discussion_id}/stream")
    async def discussion_stream(discussion_id: str, request: Request):
        _, err = gate(request, "imports")
        if err:
            return err
        return await _stream(request, topic_discussion(discussion_id))

    @app.get("/events/{event_id}/stream/public")
    async def event_stream_public(event_id: str, request: Request):
        _, err = gate(request, "read_public", event_id)
        if err:
            return err
        return await _stream(request, topic_event(event_id, "public"))

    @app.get("/events/{event_id}/stream/facilitator")
    async def event_stream_facilitator(event_id: str, request: Request):
        _, err = gate(request, "facilitate", event_id)
        if err:
            return err
        return await _stream(request, topic_event(event_id, "facilitator"))

    # --- ops ---

    @app.get("/healthz")
    async def healthz():
        return {"ok": True, "records": platform.log.last_seq}

    @app.get("/verify")
    async def verify(request: Request):
        _, err = gate(request, "admin")
        if err:
            return err
        return platform.verify()

    return app
