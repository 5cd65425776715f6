"""HTTP + websocket surface over a hosted simulation.

Endpoints: POST /join, GET /state, POST /propose, POST /vote, POST /control,
GET /metrics (the delimited export), and a socket upgrade at /live that
streams one snapshot per step. Every message carries the protocol version
and the step it describes.
"""

from __future__ import annotations

import queue
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from starlette.concurrency import run_in_threadpool
from starlette.staticfiles import StaticFiles

from .governance import API_PROTOCOL_VERSION, GovernanceError
from .host import SimulationHost
from .schemas import (
    AckResponse,
    BallotResponse,
    ControlRequest,
    ControlResponse,
    JoinResponse,
    ProposeRequest,
    Snapshot,
    VoteRequest,
)


def create_app(host: SimulationHost, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="citysim", version="0.1.0")
    app.state.host = host

    @app.exception_handler(GovernanceError)
    async def governance_error(request, exc: GovernanceError):
        return JSONResponse(
            status_code=exc.status_code,
            content={
                "type": "error",
                "protocol": API_PROTOCOL_VERSION,
                "step": host.world.step,
                "error": type(exc).__name__,
                "detail": str(exc),
            },
        )

    @app.post("/join", response_model=JoinResponse)
    def join():
        return host.join()

    @app.get("/state", response_model=Snapshot)
    def state():
        return host.snapshot()

    @app.get("/citizen/{session_id}", response_model=JoinResponse)
    def citizen(session_id: str):
        return host.citizen(session_id)

    @app.post("/propose", response_model=BallotResponse)
    def propose(req: ProposeRequest):
        return host.propose(req.session, req.kind, req.sector, req.increments)

    @app.post("/vote", response_model=AckResponse)
    def vote(req: VoteRequest):
        return host.vote(req.session, req.ballot, req.choice)

    @app.post("/control", response_model=ControlResponse)
    def control(req: ControlRequest):
        if req.command == "step":
            host.step()
        elif req.command == "pause":
            host.pause()
        elif req.command == "resume":
            host.resume()
        return {
            "type": "ack",
            "protocol": API_PROTOCOL_VERSION,
            "step": host.world.step,
            "command": req.command,
        }

    @app.get("/metrics", response_class=PlainTextResponse)
    def metrics():
        return host.metrics_csv()

    @app.websocket("/live")
    async def live(ws: WebSocket):
        await ws.accept()
        sid, q = host.subscribe()
        try:
            await ws.send_json(host.snapshot())
            while True:
                try:
                    # bounded wait keeps the worker thread cancellable
                    message = await run_in_threadpool(q.get, True, 0.5)
                except queue.Empty:
                    continue
                await ws.send_json(message)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            host.unsubscribe(sid)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index():
            return (
                "<html><body><h1>citysim</h1>"
                "<p>No frontend build found. API: POST /join, GET /state, "
                "POST /propose, POST /vote, POST /control, GET /metrics, WS /live.</p>"
                "</body></html>"
            )

    return app
