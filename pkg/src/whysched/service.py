"""HTTP API and session orchestration for the five-step workflow:
query -> parse -> verify -> explain -> refine.

Sessions are server-side: each owns a private KB clone (so blocking clauses
and solver state never leak across users), the current schedule, pending
verification tokens (single-use), and an append-only history persisted as
one JSONL file per session. Every mutation is flushed to disk before the
response goes out; after a restart the history endpoint still serves old
sessions from disk. Explanation is reachable only through a confirmed
token, which is what enforces the verification step server-side.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import queryparse
from .catalog import Catalog, load_catalog
from .encoder import encode
from .explainer import AlternativeSchedule, explain
from .llm_gateway import GatewayConfig
from .refiner import refine_llm, refine_template
from .scheduler import Exhausted, Schedule, generate_schedule, next_schedule


@dataclass
class ServiceConfig:
    catalog_path: Union[str, Path]
    data_dir: Union[str, Path]
    llm: GatewayConfig = field(default_factory=GatewayConfig)
    static_dir: Optional[Path] = None


@dataclass
class Session:
    id: str
    kb: object
    schedule: Optional[Schedule]
    pending: dict[str, "queryparse.ParsedQuery"] = field(default_factory=dict)
    last_alternative: Optional[Schedule] = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionStore:
    def __init__(self, catalog: Catalog, data_dir: Path):
        self.catalog = catalog
        self.sessions_dir = data_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self) -> Session:
        sid = secrets.token_hex(12)
        kb = encode(self.catalog)
        result = generate_schedule(kb)
        schedule = result if isinstance(result, Schedule) else None
        session = Session(id=sid, kb=kb, schedule=schedule)
        with self._lock:
            self._sessions[sid] = session
        self.append_event(sid, "session_created", {})
        if schedule is not None:
            self.append_event(sid, "schedule_generated",
                              schedule.to_document(self.catalog))
        else:
            self.append_event(sid, "schedule_infeasible", {})
        return session

    def get(self, sid: str) -> Optional[Session]:
        with self._lock:
            return self._sessions.get(sid)

    def _history_path(self, sid: str) -> Path:
        return self.sessions_dir / f"{sid}.jsonl"

    def append_event(self, sid: str, kind: str, payload: dict) -> None:
        record = {"ts": time.time(), "kind": kind, "payload": payload}
        with open(self._history_path(sid), "a", encoding="utf-8") as fp:
            fp.write(json.dumps(record) + "\n")
            fp.flush()
            os.fsync(fp.fileno())

    def read_history(self, sid: str) -> Optional[list[dict]]:
        path = self._history_path(sid)
        if not path.exists():
            return None
        return [json.loads(line) for line in
                path.read_text(encoding="utf-8").splitlines() if line.strip()]


class QueryBody(BaseModel):
    text: str


class ConfirmBody(BaseModel):
    confirmed: bool


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="whysched", docs_url=None, redoc_url=None)
    catalog = load_catalog(config.catalog_path)
    store = SessionStore(catalog, Path(config.data_dir))
    app.state.store = store
    app.state.config = config

    def error(status: int, payload: dict) -> JSONResponse:
        return JSONResponse(status_code=status, content=payload)

    def not_found(what: str) -> JSONResponse:
        return error(404, {"error": "not_found", "message": what})

    @app.post("/api/session")
    async def create_session(request: Request):
        raw = await request.body()
        if raw.strip():
            try:
                json.loads(raw)
            except ValueError:
                return error(400, {"error": "bad_request",
                                   "message": "body must be JSON or empty"})
        session = store.create()
        if session.schedule is None:
            return {"session_id": session.id, "status": "infeasible"}
        return {"session_id": session.id,
                "schedule": session.schedule.to_document(catalog)}

    @app.post("/api/session/{sid}/schedules/next")
    def advance_schedule(sid: str):
        session = store.get(sid)
        if session is None:
            return not_found("unknown session")
        with session.lock:
            if session.schedule is None:
                return {"status": "exhausted"}
            result = next_schedule(session.kb, session.schedule)
            if isinstance(result, Exhausted):
                store.append_event(sid, "enumeration_exhausted", {})
                return {"status": "exhausted"}
            session.schedule = result
            store.append_event(sid, "schedule_generated",
                               result.to_document(catalog))
            return {"schedule": result.to_document(catalog)}

    @app.post("/api/session/{sid}/query")
    def submit_query(sid: str, body: QueryBody):
        session = store.get(sid)
        if session is None:
            return not_found("unknown session")
        with session.lock:
            if session.schedule is None:
                return error(409, {"error": "infeasible",
                                   "message": "no schedule to query"})
            try:
                if config.llm.mode == "disabled":
                    parsed = queryparse.parse(body.text, session.schedule, catalog)
                else:
                    parsed = queryparse.parse_llm(body.text, session.schedule,
                                                  catalog, config.llm)
            except queryparse.QueryError as e:
                return error(422, e.payload())
            restatement = queryparse.restate(parsed, session.schedule)
            session.pending[restatement.token] = parsed
            store.append_event(sid, "query_submitted",
                               {"text": body.text, "restatement": restatement.text,
                                "token": restatement.token})
            return {"restatement": restatement.text,
                    "query_token": restatement.token,
                    "parsed": parsed.to_document()}

    @app.post("/api/session/{sid}/query/{token}/confirm")
    def confirm_query(sid: str, token: str, body: ConfirmBody):
        session = store.get(sid)
        if session is None:
            return not_found("unknown session")
        with session.lock:
            parsed = session.pending.pop(token, None)
            if parsed is None:
                return not_found("unknown or already used token")
            if not body.confirmed:
                store.append_event(sid, "query_discarded", {"token": token})
                return {"status": "discarded"}
            store.append_event(sid, "query_confirmed", {"token": token})
            try:
                foil = queryparse.to_foil(parsed, session.schedule, session.kb)
            except queryparse.QueryError as e:
                return error(422, e.payload())
            result = explain(session.kb, foil)
            if isinstance(result, AlternativeSchedule):
                session.last_alternative = result.schedule
                doc = result.schedule.to_document(catalog)
                store.append_event(sid, "alternative_returned", {"schedule": doc})
                return {"kind": "alternative_schedule", "schedule": doc}
            explanation = result.explanation
            if config.llm.mode == "disabled":
                refined = refine_template(explanation, session.schedule, catalog)
            else:
                refined = refine_llm(explanation, session.schedule, catalog,
                                     config.llm)
            payload = {"kind": "explanation", "text": refined.text,
                       "mode": refined.mode,
                       **explanation.to_document()}
            store.append_event(sid, "explanation_returned", payload)
            return payload

    @app.post("/api/session/{sid}/alternative/adopt")
    def adopt_alternative(sid: str):
        session = store.get(sid)
        if session is None:
            return not_found("unknown session")
        with session.lock:
            if session.last_alternative is None:
                return not_found("no alternative schedule to adopt")
            session.schedule = session.last_alternative
            session.last_alternative = None
            doc = session.schedule.to_document(catalog)
            store.append_event(sid, "alternative_adopted", {"schedule": doc})
            return {"schedule": doc}

    @app.get("/api/session/{sid}/history")
    def history(sid: str):
        events = store.read_history(sid)
        if events is None:
            return not_found("unknown session")
        return {"events": events}

    if config.static_dir and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True),
                  name="static")

    return app
