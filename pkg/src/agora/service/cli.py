"""Command-line interface.

All commands operate directly on the data directory (single-writer store).
``serve`` runs the HTTP API; ``simulate-event`` replays a reflection log at a
speed multiplier, optionally serving the API concurrently so dashboards can
watch the replay live. Errors print machine-readable JSON on stderr and exit
non-zero. ``--mock-gateway`` pins the deterministic gateway, clock and ids.
"""

from __future__ import annotations

import json
import sys
import threading
import time
from pathlib import Path

import click

from ..errors import AgoraError
from ..gateway import Gateway
from ..jsonutil import canonical_dumps
from .auth import TokenAuthenticator
from .config import ServiceConfig, load_config
from .platform import Platform


def _fail(error: AgoraError | str, exit_code: int = 1):
    payload = error.to_payload() if isinstance(error, AgoraError) else {
        "code": "Error", "message": str(error)}
    click.echo(canonical_dumps({"error": payload}), err=True)
    sys.exit(exit_code)


def _open_platform(ctx) -> Platform:
    params = ctx.obj
    config = load_config(
        params.get("config"),
        data_dir=params.get("data_dir"),
        gateway_mode="Mock" if params.get("mock_gateway") else None,
        deterministic=True if params.get("mock_gateway") else None,
    )
    return Platform(config, Gateway(config.gateway))


def _run(ctx, fn):
    platform = None
    try:
        platform = _open_platform(ctx)
        fn(platform)
    except AgoraError as exc:
        _fail(exc, exit_code=1)
    except (OSError, ValueError) as exc:
        _fail(str(exc), exit_code=1)
    finally:
        if platform is not None:
            platform.close()


@click.group()
@click.option("--data-dir", type=click.Path(), default=None, help="store directory")
@click.option("--config", "config", type=click.Path(exists=True), default=None)
@click.option("--mock-gateway", is_flag=True, default=False,
              help="deterministic gateway, clock and ids")
@click.pass_context
def main(ctx, data_dir, config, mock_gateway):
    ctx.obj = {"data_dir": data_dir, "config": config, "mock_gateway": mock_gateway}


@main.command("create-discussion")
@click.option("--title", required=True)
@click.option("--question", required=True)
@click.option("--author", default="host")
@click.pass_context
def create_discussion(ctx, title, question, author):
    def go(platform):
        click.echo(canonical_dumps(platform.create_discussion(title, question, author)))

    _run(ctx, go)


@main.command("ingest-transcript")
@click.argument("file", type=click.Path(exists=True))
@click.option("--discussion", "discussion_id", required=True)
@click.option("--actor", default="curator")
@click.pass_context
def ingest_transcript(ctx, file, discussion_id, actor):
    """Register a transcript file and open an import session for it."""
    def go(platform):
        data = json.loads(Path(file).read_text(encoding="utf-8"))
        transcript_id = platform.register_transcript(data)
        session_id = platform.create_import(transcript_id, discussion_id, actor)
        click.echo(canonical_dumps({"transcript_id": transcript_id,
                                    "session_id": session_id}))

    _run(ctx, go)


@main.command("analyze")
@click.argument("session_id")
@click.option("--actor", default="curator")
@click.pass_context
def analyze(ctx, session_id, actor):
    def go(platform):
        session = platform.analyze_import(session_id, actor)
        click.echo(canonical_dumps({"session_id": session_id, "state": session["state"],
                                    "nodes": len(session["draft"]["nodes"]),
                                    "warnings": session["draft"]["warnings"]}))

    _run(ctx, go)


@main.command("approve")
@click.argument("session_id")
@click.option("--actor", default="curator")
@click.pass_context
def approve(ctx, session_id, actor):
    def go(platform):
        session = platform.approve_import(session_id, actor)
        click.echo(canonical_dumps({"session_id": session_id, "state": session["state"]}))

    _run(ctx, go)


@main.command("reject")
@click.argument("session_id")
@click.option("--reason", default="unspecified")
@click.option("--actor", default="curator")
@click.pass_context
def reject(ctx, session_id, reason, actor):
    def go(platform):
        session = platform.reject_import(session_id, actor, reason)
        click.echo(canonical_dumps({"session_id": session_id, "state": session["state"]}))

    _run(ctx, go)


@main.command("merge")
@click.argument("session_id")
@click.option("--actor", default="curator")
@click.pass_context
def merge(ctx, session_id, actor):
    def go(platform):
        ids = platform.merge_import(session_id, actor)
        click.echo(canonical_dumps({"session_id": session_id, "contribution_ids": ids}))

    _run(ctx, go)


@main.command("cluster")
@click.argument("discussion_id")
@click.option("--k", type=int, required=True)
@click.pass_context
def cluster(ctx, discussion_id, k):
    """Fit clusters, label them, and store the distilled recommendations."""
    if not 2 <= k <= 8:
        _fail(AgoraError(f"--k must lie in [2, 8], got {k}"), exit_code=2)

    def go(platform):
        payload = platform.refresh_recommendations(discussion_id, k)
        click.echo(canonical_dumps({"discussion_id": discussion_id, "k": k,
                                    "fingerprint": payload["fingerprint"],
                                    "recommendations": len(payload["recommendations"])}))

    _run(ctx, go)


@main.command("report")
@click.argument("discussion_id")
@click.option("--style", default="Executive",
              type=click.Choice(["Executive", "Analytical", "Narrative"]))
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="write markdown (.md) or canonical JSON (.json)")
@click.pass_context
def report(ctx, discussion_id, style, out_path):
    def go(platform):
        report_json, markdown = platform.report(discussion_id, style)
        if out_path is None:
            click.echo(markdown)
            return
        path = Path(out_path)
        if path.suffix == ".json":
            path.write_text(canonical_dumps(report_json) + "\n", encoding="utf-8")
        else:
            path.write_text(markdown, encoding="utf-8")
        click.echo(canonical_dumps({"discussion_id": discussion_id, "style": style,
                                    "out": str(path)}))

    _run(ctx, go)


@main.command("create-event")
@click.argument("deck_file", type=click.Path(exists=True))
@click.option("--transcript-file", type=click.Path(exists=True), default=None,
              help="attach a diarized transcript for spike linking")
@click.pass_context
def create_event(ctx, deck_file, transcript_file):
    def go(platform):
        deck = json.loads(Path(deck_file).read_text(encoding="utf-8"))
        event_id = platform.create_event(deck)
        out = {"event_id": event_id}
        if transcript_file:
            data = json.loads(Path(transcript_file).read_text(encoding="utf-8"))
            transcript_id = platform.register_transcript(data)
            platform.attach_event_transcript(event_id, transcript_id)
            out["transcript_id"] = transcript_id
        click.echo(canonical_dumps(out))

    _run(ctx, go)


def _replay(platform, event_id: str, replay_path: str, speed: float,
            sweep_every_ms: int = 1_000) -> dict:
    events = []
    for line in Path(replay_path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            events.append(json.loads(line))
    accepted = duplicates = 0
    started = time.monotonic()
    last_sweep = -1.0
    previous_t = events[0]["t_ms"] if events else 0
    for event in events:
        gap = max(0, event["t_ms"] - previous_t)
        previous_t = event["t_ms"]
        if gap and speed > 0:
            time.sleep(gap / 1000.0 / speed)
        outcome = platform.record_reflection(event_id, event["participant"],
                                             event["card_id"], event["t_ms"])
        if outcome["status"] == "accepted":
            accepted += 1
        else:
            duplicates += 1
        elapsed = time.monotonic() - started
        if elapsed - last_sweep >= sweep_every_ms / 1000.0:
            last_sweep = elapsed
            platform.run_detection(event_id)
    platform.run_detection(event_id)  # settle the final windows
    return {"event_id": event_id, "events": len(events), "accepted": accepted,
            "duplicates": duplicates,
            "wall_seconds": round(time.monotonic() - started, 3)}


@main.command("simulate-event")
@click.argument("event_id")
@click.option("--replay", "replay_path", type=click.Path(exists=True), required=True)
@click.option("--speed", type=float, default=1.0, help="time compression factor")
@click.option("--serve-port", type=int, default=None,
              help="serve the HTTP API concurrently while replaying")
@click.pass_context
def simulate_event(ctx, event_id, replay_path, speed, serve_port):
    """Replay a newline-delimited reflection log into a live event."""
    def go(platform):
        if serve_port is None:
            click.echo(canonical_dumps(_replay(platform, event_id, replay_path, speed)))
            return
        import uvicorn

        from .api import create_app

        app = create_app(platform, TokenAuthenticator(platform.config.tokens))
        server = uvicorn.Server(uvicorn.Config(app, host=platform.config.host,
                                               port=serve_port, log_level="warning"))
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        while not server.started:
            time.sleep(0.02)
        stats = _replay(platform, event_id, replay_path, speed, sweep_every_ms=200)
        click.echo(canonical_dumps(stats))
        click.echo(canonical_dumps({"serving": True, "port": serve_port}))
        try:
            while True:
                time.sleep(0.5)
        except KeyboardInterrupt:
            server.should_exit = True

    _run(ctx, go)


@main.command("verify-store")
@click.pass_context
def verify_store(ctx):
    """Run every integrity invariant over the store."""
    def go(platform):
        result = platform.verify()
        click.echo(canonical_dumps(result))
        if not result["ok"]:
            sys.exit(1)

    _run(ctx, go)


@main.command("serve")
@click.option("--port", type=int, default=None)
@click.pass_context
def serve(ctx, port):
    def go(platform):
        import uvicorn

        from .api import create_app

        if port is not None:
            object.__setattr__(platform.config, "port", port)
        app = create_app(platform, TokenAuthenticator(platform.config.tokens))

        stop = threading.Event()

        def detection_loop():
            while not stop.is_set():
                for event_id in list(platform.state.events):
                    if not platform.state.events[event_id].closed:
                        try:
                            platform.run_detection(event_id)
                        except AgoraError:
                            pass
                stop.wait(platform.config.detection_poll_ms / 1000.0)

        worker = threading.Thread(target=detection_loop, daemon=True)
        worker.start()
        try:
            uvicorn.run(app, host=platform.config.host, port=platform.config.port,
                        log_level="info")
        finally:
            stop.set()

    _run(ctx, go)


if __name__ == "__main__":
    main()
