"""HTTP and server-sent-events interface for supervised sessions.

One FastAPI app owns a scenario store and the live sessions.  A single
background ticker advances every playing session at the configured
realtime factor; every trace record is fanned out to SSE subscribers,
who can resume from any sequence number via ``Last-Event-ID`` or
``?since=``.
"""
from __future__ import annotations

import asyncio
import json
from contextlib import asynccontextmanager, suppress
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal
from uuid import uuid4

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import PlainTextResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import Config
from .errors import DecisionConflictError, MissingDecisionPointError, ScenarioError
from .scenario import ScenarioStore
from .session import Session
from .trace import records_to_jsonl

SSE_EVENT_NAMES = {
    "tick": "state",
    "plan": "plan",
    "explanation": "explanation",
    "decision": "decision-recorded",
    "warning": "warning",
}
HEARTBEAT_SECONDS = 15.0


@dataclass
class SessionHandle:
    session: Session
    changed: asyncio.Condition = field(default_factory=asyncio.Condition)


class CreateSessionRequest(BaseModel):
    scenario_id: str


class PlaybackRequest(BaseModel):
    action: Literal["play", "pause", "seek"]
    time: float | None = None


class DecisionRequest(BaseModel):
    verdict: Literal["accepted", "declined"]


class FoilRequest(BaseModel):
    characteristic: Literal["reduced_speed", "port_turn", "starboard_turn",
                            "closer_to_route", "farther_from_route"]


def _default_ui_dir() -> Path | None:
    # repo layout: src/bridgewatch/server.py -> <root>/frontend/dist
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def create_app(cfg: Config | None = None, store: ScenarioStore | None = None) -> FastAPI:
    cfg = cfg or Config()
    if store is None:
        store = (ScenarioStore.from_dir(cfg.server.scenario_dir)
                 if cfg.server.scenario_dir else ScenarioStore.bundled())

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        ticker = asyncio.create_task(_ticker(app))
        try:
            yield
        finally:
            ticker.cancel()
            with suppress(asyncio.CancelledError):
                await ticker

    app = FastAPI(title="bridgewatch", lifespan=lifespan)
    app.state.cfg = cfg
    app.state.store = store
    app.state.handles = {}

    def handle_of(session_id: str) -> SessionHandle:
        handle = app.state.handles.get(session_id)
        if handle is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return handle

    async def notify(handle: SessionHandle) -> None:
        async with handle.changed:
            handle.changed.notify_all()

    @app.get("/api/scenarios")
    def list_scenarios() -> list[dict[str, Any]]:
        return [{
            "id": sc.id,
            "title": sc.title,
            "description": sc.description,
            "foil_characteristic": sc.foil_characteristic.value,
            "obstacles": len(sc.obstacles),
        } for sc in store]

    @app.post("/api/sessions", status_code=201)
    def create(body: CreateSessionRequest) -> dict[str, Any]:
        try:
            scenario = store.get(body.scenario_id)
        except ScenarioError as exc:
            raise HTTPException(404, str(exc)) from exc
        session = Session(uuid4().hex[:12], scenario, cfg)
        app.state.handles[session.session_id] = SessionHandle(session)
        return session.snapshot()

    @app.get("/api/sessions/{session_id}")
    def snapshot(session_id: str) -> dict[str, Any]:
        return handle_of(session_id).session.snapshot()

    @app.post("/api/sessions/{session_id}/playback")
    async def playback(session_id: str, body: PlaybackRequest) -> dict[str, Any]:
        handle = handle_of(session_id)
        session = handle.session
        if body.action == "play":
            session.play()
        elif body.action == "pause":
            session.pause()
        else:
            if body.time is None:
                raise HTTPException(400, "seek needs a time")
            try:
                session.seek(body.time)
            except ValueError as exc:
                raise HTTPException(400, str(exc)) from exc
        await notify(handle)
        return session.snapshot()

    @app.post("/api/sessions/{session_id}/decision")
    async def decision(session_id: str, body: DecisionRequest) -> dict[str, Any]:
        handle = handle_of(session_id)
        try:
            handle.session.record_decision(body.verdict)
        except DecisionConflictError as exc:
            raise HTTPException(409, str(exc)) from exc
        await notify(handle)
        return handle.session.snapshot()

    @app.post("/api/sessions/{session_id}/foil")
    async def foil(session_id: str, body: FoilRequest) -> dict[str, Any]:
        handle = handle_of(session_id)
        try:
            handle.session.set_foil_characteristic(body.characteristic)
        except MissingDecisionPointError as exc:
            raise HTTPException(409, str(exc)) from exc
        await notify(handle)
        return handle.session.snapshot()

    @app.get("/api/sessions/{session_id}/trace")
    def trace(session_id: str) -> PlainTextResponse:
        session = handle_of(session_id).session
        return PlainTextResponse(records_to_jsonl(session.trace),
                                 media_type="application/x-ndjson")

    @app.get("/api/sessions/{session_id}/events")
    async def events(session_id: str, request: Request,
                     since: int | None = None,
                     limit: int | None = None) -> StreamingResponse:
        handle = handle_of(session_id)
        if since is None:
            header = request.headers.get("last-event-id")
            if header is not None:
                try:
                    since = int(header)
                except ValueError:
                    raise HTTPException(400, "Last-Event-ID must be an integer")
        start = -1 if since is None else since
        return StreamingResponse(_event_stream(handle, start, limit),
                                 media_type="text/event-stream",
                                 headers={"Cache-Control": "no-cache"})

    ui_dir = Path(cfg.server.ui_dir) if cfg.server.ui_dir else _default_ui_dir()
    if ui_dir is not None and ui_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _format_sse(record: dict[str, Any]) -> str:
    event = SSE_EVENT_NAMES.get(record.get("kind"), "message")
    data = json.dumps(record, separators=(",", ":"))
    return f"id: {record['seq']}\nevent: {event}\ndata: {data}\n\n"


async def _event_stream(handle: SessionHandle, since: int, limit: int | None):
    index = since + 1
    sent = 0
    while True:
        trace = handle.session.trace
        while index < len(trace):
            yield _format_sse(trace[index])
            index += 1
            sent += 1
            if limit is not None and sent >= limit:
                return
        try:
            async with handle.changed:
                await asyncio.wait_for(handle.changed.wait(), HEARTBEAT_SECONDS)
        except asyncio.TimeoutError:
            yield ": keep-alive\n\n"


async def _ticker(app: FastAPI) -> None:
    cfg: Config = app.state.cfg
    period = cfg.session.tick / max(cfg.server.realtime_factor, 1e-6)
    while True:
        await asyncio.sleep(period)
        for handle in list(app.state.handles.values()):
            if handle.session.playback == "playing":
                handle.session.step()
                async with handle.changed:
                    handle.changed.notify_all()
