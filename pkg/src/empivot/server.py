"""WebSocket service exposing simulation sessions to local clients.

Protocol ``empivot/1``: JSON frames over a single WebSocket at ``/ws``.
Every connection gets its own session.  Client frames carry a ``type``
and optionally an ``id`` echoed back on the direct reply so callers can
correlate request/response pairs; session events are additionally pushed
as individual ``event`` frames (the subscription stream).

Client -> server frame types:

``hello``                     -> ``welcome`` (full session description)
``state``                     -> ``state``
``hash``                      -> ``hash`` (for client-side reconciliation)
``maneuver`` cube/axis/direction -> ``event``xN then ``result``
``settings`` set={...}        -> ``settings``
``export`` start/stop/format  -> ``timeline`` (text, or base64 binary)
``corpus``                    -> ``corpus`` (shipped scenario names)
``load`` name|text            -> ``welcome`` for the replacement session

Errors use ``{"type": "error", "code": ..., "message": ...}``; protocol
errors never close the socket.
"""

from __future__ import annotations

import base64
import binascii
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .scenario import (
    Scenario,
    ScenarioError,
    corpus_names,
    load_corpus_scenario,
    load_scenario,
)
from .service import HistoryRangeError, Session, create_session, parse_request

PROTOCOL = "empivot/1"

__all__ = ["PROTOCOL", "create_app", "default_scenario", "serve"]


def default_scenario() -> Scenario:
    """Scenario a fresh server offers before the client loads anything."""
    return load_corpus_scenario(corpus_names()[0])


def _welcome(session: Session) -> dict[str, Any]:
    return {"type": "welcome", "protocol": PROTOCOL, **session.describe()}


def _error(code: str, message: str, msg_id: Any = None) -> dict[str, Any]:
    frame: dict[str, Any] = {"type": "error", "code": code, "message": message}
    if msg_id is not None:
        frame["id"] = msg_id
    return frame


class _Connection:
    """Per-socket dispatcher; owns exactly one session at a time."""

    def __init__(self, scenario: Scenario, export_path: Optional[Path] = None):
        self.session = create_session(scenario)
        self.export_path = export_path

    def handle(self, message: dict[str, Any]) -> list[dict[str, Any]]:
        """Map one client frame to the ordered frames to send back."""
        msg_id = message.get("id")
        kind = message.get("type")
        try:
            if kind == "hello":
                return [self._tag(_welcome(self.session), msg_id)]
            if kind == "state":
                return [
                    self._tag(
                        {"type": "state", **self.session.state_payload()},
                        msg_id,
                    )
                ]
            if kind == "hash":
                return [
                    self._tag(
                        {"type": "hash", "value": self.session.state_hash()},
                        msg_id,
                    )
                ]
            if kind == "maneuver":
                return self._maneuver(message, msg_id)
            if kind == "settings":
                changes = message.get("set", {})
                if not isinstance(changes, dict):
                    return [_error("bad-settings", "set must be an object", msg_id)]
                try:
                    updated = self.session.update_settings(**changes)
                except (TypeError, ValueError) as exc:
                    return [_error("bad-settings", str(exc), msg_id)]
                return [
                    self._tag(
                        {"type": "settings", "settings": updated.to_dict()},
                        msg_id,
                    )
                ]
            if kind == "export":
                return self._export(message, msg_id)
            if kind == "corpus":
                return [
                    self._tag({"type": "corpus", "names": corpus_names()}, msg_id)
                ]
            if kind == "load":
                return self._load(message, msg_id)
        except Exception as exc:  # last resort: report, keep socket alive
            return [_error("internal", str(exc), msg_id)]
        return [
            _error(
                "bad-message",
                f"unknown message type {kind!r}",
                msg_id,
            )
        ]

    @staticmethod
    def _tag(frame: dict[str, Any], msg_id: Any) -> dict[str, Any]:
        if msg_id is not None:
            frame["id"] = msg_id
        return frame

    def _maneuver(self, message: dict[str, Any], msg_id: Any) -> list[dict[str, Any]]:
        try:
            request = parse_request(message)
        except ValueError as exc:
            return [_error("bad-request", str(exc), msg_id)]
        events = self.session.request_maneuver(request)
        frames: list[dict[str, Any]] = [
            {"type": "event", "event": e.to_dict()} for e in events
        ]
        ok = events[-1].kind == "settled"
        frames.append(
            self._tag(
                {
                    "type": "result",
                    "ok": ok,
                    "state": self.session.state_payload(),
                },
                msg_id,
            )
        )
        return frames

    def _export(self, message: dict[str, Any], msg_id: Any) -> list[dict[str, Any]]:
        fmt = message.get("format", "text")
        if fmt not in ("text", "binary"):
            return [_error("bad-request", f"unknown format {fmt!r}", msg_id)]
        try:
            start = int(message.get("start", 0))
            stop_raw = message.get("stop")
            stop = None if stop_raw is None else int(stop_raw)
        except (TypeError, ValueError):
            return [_error("bad-request", "start/stop must be integers", msg_id)]
        try:
            timeline = self.session.export_timeline(start, stop)
        except HistoryRangeError as exc:
            return [_error("bad-range", str(exc), msg_id)]
        frame: dict[str, Any] = {
            "type": "timeline",
            "format": fmt,
            "entries": len(timeline.entries),
            "span_ms": timeline.span_ms,
        }
        if fmt == "text":
            frame["text"] = timeline.to_text()
        else:
            frame["base64"] = base64.b64encode(timeline.to_binary()).decode("ascii")
        if self.export_path is not None:
            if fmt == "text":
                self.export_path.write_text(frame["text"], encoding="utf-8")
            else:
                self.export_path.write_bytes(timeline.to_binary())
            frame["saved"] = str(self.export_path)
        return [self._tag(frame, msg_id)]

    def _load(self, message: dict[str, Any], msg_id: Any) -> list[dict[str, Any]]:
        name = message.get("name")
        text = message.get("text")
        try:
            if name is not None:
                scenario = load_corpus_scenario(str(name))
            elif text is not None:
                scenario = load_scenario(str(text))
            else:
                return [_error("bad-request", "load needs name or text", msg_id)]
        except FileNotFoundError:
            return [_error("bad-request", f"no shipped scenario {name!r}", msg_id)]
        except ScenarioError as exc:
            return [_error("bad-scenario", str(exc), msg_id)]
        settings = self.session.settings
        self.session = create_session(scenario)
        self.session.update_settings(**settings.to_dict())
        return [self._tag(_welcome(self.session), msg_id)]


def create_app(
    scenario: Optional[Scenario] = None,
    *,
    static_dir: Optional[Path] = None,
    export_path: Optional[Path] = None,
) -> FastAPI:
    """Build the service app.

    ``static_dir`` (when given and present) is served at ``/`` for the
    browser client; omit it for a headless, socket-only service.  When
    ``export_path`` is set, every client-requested timeline export is also
    written there (latest export wins).
    """
    base = scenario if scenario is not None else default_scenario()
    export_file = Path(export_path) if export_path is not None else None
    app = FastAPI(title="empivot service", version=PROTOCOL)

    @app.get("/healthz")
    def healthz() -> dict[str, Any]:
        return {"ok": True, "protocol": PROTOCOL}

    @app.websocket("/ws")
    async def ws(socket: WebSocket) -> None:
        await socket.accept()
        conn = _Connection(base, export_path=export_file)
        for frame in conn.handle({"type": "hello"}):
            await socket.send_json(frame)
        while True:
            try:
                message = await socket.receive_json()
            except WebSocketDisconnect:
                return
            except (ValueError, binascii.Error):
                await socket.send_json(_error("bad-json", "frames must be JSON objects"))
                continue
            if not isinstance(message, dict):
                await socket.send_json(_error("bad-json", "frames must be JSON objects"))
                continue
            for frame in conn.handle(message):
                await socket.send_json(frame)

    if static_dir is not None:
        static_dir = Path(static_dir)
        if static_dir.is_dir():
            app.mount(
                "/", StaticFiles(directory=str(static_dir), html=True), name="ui"
            )
    return app


def serve(
    host: str = "127.0.0.1",
    port: int = 8763,
    *,
    scenario: Optional[Scenario] = None,
    static_dir: Optional[Path] = None,
    export_path: Optional[Path] = None,
) -> None:
    """Run the service until interrupted (blocking)."""
    import uvicorn

    app = create_app(scenario, static_dir=static_dir, export_path=export_path)
    uvicorn.run(app, host=host, port=port, log_level="warning")
