"""Session-based HTTP/JSON service exposing the engine under /api/v1.

Sessions live in memory, keyed by an opaque 128-bit hex token.  Each
session's mutations are serialized behind its own lock, so concurrent
requests against different sessions proceed independently while requests
against the same session queue up.  An optional state file persists all
session snapshots across restarts (written on shutdown, loaded on startup);
uvicorn's signal handling makes that fire on SIGINT/SIGTERM too.
"""

from __future__ import annotations

import json
import logging
import secrets
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import APIRouter, FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from .engine import Session, SessionConfig
from .errors import ConfigError, EmptyDatasetError, NotTrainedError
from .mechanisms import MechanismKind
from .models import ModelKind
from .recovery import DEFAULT_SHARPNESS, recover_session

logger = logging.getLogger("ldpfed.service")


class CreateSessionRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: Literal["linear", "logistic", "svm"]
    mechanism: Literal["none", "laplace", "duchi", "piecewise", "hybrid"]
    epsilon: float | None = None
    seed: int = Field(ge=0, lt=2**64)
    learning_rate: float = Field(default=0.01, gt=0)


class AddUsersRequest(BaseModel):
    count: int = Field(ge=1)


class RecoverRequest(BaseModel):
    k: float = Field(default=DEFAULT_SHARPNESS, gt=0)


@dataclass
class StoredSession:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory id -> session map with per-session locking."""

    def __init__(self):
        self._sessions: dict[str, StoredSession] = {}
        self._lock = threading.Lock()

    def create(self, session: Session) -> str:
        session_id = secrets.token_hex(16)
        with self._lock:
            self._sessions[session_id] = StoredSession(session)
        return session_id

    def get(self, session_id: str) -> StoredSession:
        with self._lock:
            stored = self._sessions.get(session_id)
        if stored is None:
            raise HTTPException(
                status_code=404,
                detail={"error": "unknown_session", "session_id": session_id},
            )
        return stored

    def delete(self, session_id: str) -> None:
        with self._lock:
            if session_id not in self._sessions:
                raise HTTPException(
                    status_code=404,
                    detail={"error": "unknown_session", "session_id": session_id},
                )
            del self._sessions[session_id]

    def snapshot_all(self) -> dict:
        with self._lock:
            items = list(self._sessions.items())
        return {"sessions": {sid: s.session.to_snapshot() for sid, s in items}}

    def restore_all(self, payload: dict) -> None:
        with self._lock:
            for sid, snap in payload.get("sessions", {}).items():
                self._sessions[sid] = StoredSession(Session.from_snapshot(snap))

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)


def create_app(static_dir: str | None = None, state_file: str | None = None) -> FastAPI:
    store = SessionStore()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if state_file and Path(state_file).exists():
            store.restore_all(json.loads(Path(state_file).read_text()))
            logger.info("restored %d session(s) from %s", len(store), state_file)
        yield
        if state_file:
            Path(state_file).write_text(json.dumps(store.snapshot_all()))
            logger.info("persisted %d session(s) to %s", len(store), state_file)

    app = FastAPI(title="ldpfed", lifespan=lifespan)
    app.state.store = store

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        start = time.perf_counter()
        response = await call_next(request)
        logger.info(
            "%s %s -> %d (%.1f ms)",
            request.method,
            request.url.path,
            response.status_code,
            (time.perf_counter() - start) * 1000.0,
        )
        return response

    @app.exception_handler(ConfigError)
    async def config_error_handler(request: Request, exc: ConfigError):
        return JSONResponse(
            status_code=422,
            content={"detail": {"error": "invalid_config", "message": str(exc)}},
        )

    router = APIRouter(prefix="/api/v1")

    @router.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        config = SessionConfig(
            model=ModelKind(req.model),
            mechanism=MechanismKind(req.mechanism),
            epsilon=req.epsilon,
            seed=req.seed,
            learning_rate=req.learning_rate,
        )
        session = Session(config)
        session_id = store.create(session)
        return {"session_id": session_id, "session": session.to_snapshot()}

    @router.get("/sessions/{session_id}")
    def get_session(session_id: str):
        stored = store.get(session_id)
        with stored.lock:
            return stored.session.to_snapshot()

    @router.post("/sessions/{session_id}/users")
    def add_users(session_id: str, req: AddUsersRequest):
        stored = store.get(session_id)
        with stored.lock:
            stored.session.add_users(req.count)
            return stored.session.to_snapshot()

    @router.post("/sessions/{session_id}/train")
    def train(session_id: str):
        stored = store.get(session_id)
        with stored.lock:
            try:
                events = stored.session.train_epoch()
            except EmptyDatasetError as exc:
                raise HTTPException(
                    status_code=409,
                    detail={"error": "no_users", "message": str(exc)},
                ) from exc
            cost, accuracy = stored.session.metrics()
            return {
                "events": [e.to_dict() for e in events],
                "final_cost": cost,
                "final_accuracy": accuracy,
                "epoch_count": stored.session.epoch_count,
            }

    @router.post("/sessions/{session_id}/recover")
    def recover(session_id: str, req: RecoverRequest | None = None):
        stored = store.get(session_id)
        k = req.k if req is not None else DEFAULT_SHARPNESS
        with stored.lock:
            try:
                report = recover_session(stored.session, k)
            except NotTrainedError as exc:
                raise HTTPException(
                    status_code=409,
                    detail={"error": "not_trained", "message": str(exc)},
                ) from exc
            return report.to_dict()

    @router.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        store.delete(session_id)
        return Response(status_code=204)

    app.include_router(router)

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(
    port: int = 8000,
    host: str = "127.0.0.1",
    static_dir: str | None = None,
    state_file: str | None = None,
) -> None:
    """Run the service until terminated; shutdown persists state if asked."""
    import uvicorn

    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    app = create_app(static_dir=static_dir, state_file=state_file)
    uvicorn.run(app, host=host, port=port, log_config=None)
