"""HTTP service exposing reasoning sessions.

Endpoints:

    POST /sessions                          -> {"id": ...}
    POST /sessions/{id}/inputs              -> event outcome
    GET  /sessions/{id}/beliefs?status=     -> {"entries": [...]}
    GET  /sessions/{id}/entries/{t}         -> entry record
    GET  /sessions/{id}/hierarchy           -> nodes, links, addresses
    GET  /sessions/{id}/pending             -> pending culprits or empty
    POST /sessions/{id}/pending             -> revision report
    GET  /sessions/{id}/export/journal      -> journal lines
    GET  /sessions/{id}/export/snapshot     -> snapshot document
    GET  /sessions/{id}/export/dot          -> graphviz text

Sessions run the deferred interactive chooser: a contradiction parks the
session, GET /pending exposes the culprits, and POST /pending supplies
the retraction choice. While parked, new inputs get 409. Mutations are
serialized per session; with a data directory every session journals to
<id>.jsonl there and existing journals are restored on startup.
"""

from __future__ import annotations

import os
import threading
import uuid
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse, Response
from pydantic import BaseModel

from .errors import (
    InvalidChoiceError,
    PendingRevisionError,
    UnknownEntryError,
)
from .revision import Interactive
from .session import Journal, Session


class InputBody(BaseModel):
    formula: str
    source: str = "user"


class ResolveBody(BaseModel):
    retract: list


class _Box:
    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()


def create_app(data_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="drs")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"])
    sessions: dict = {}

    if data_dir:
        os.makedirs(data_dir, exist_ok=True)
        for name in sorted(os.listdir(data_dir)):
            if not name.endswith(".jsonl"):
                continue
            sid = name[:-len(".jsonl")]
            journal_path = os.path.join(data_dir, name)
            records = Journal.load(journal_path)
            restored = Session.replay(records)
            restored.journal = Journal(journal_path)
            restored.journal.records = list(records)
            sessions[sid] = _Box(restored)

    def box_of(session_id: str) -> _Box:
        box = sessions.get(session_id)
        if box is None:
            raise HTTPException(404, f"no session {session_id}")
        return box

    @app.post("/sessions")
    def create_session():
        sid = uuid.uuid4().hex[:12]
        journal_path = (os.path.join(data_dir, f"{sid}.jsonl")
                        if data_dir else None)
        sessions[sid] = _Box(Session(policy=Interactive(),
                                     journal_path=journal_path))
        return {"id": sid}

    @app.post("/sessions/{session_id}/inputs")
    def post_input(session_id: str, body: InputBody):
        box = box_of(session_id)
        with box.lock:
            try:
                outcome = box.session.input(body.formula, body.source)
            except PendingRevisionError as exc:
                raise HTTPException(409, str(exc)) from None
        return outcome.export()

    @app.get("/sessions/{session_id}/beliefs")
    def get_beliefs(session_id: str, status: str = "believed"):
        box = box_of(session_id)
        if status not in ("believed", "disbelieved", "all"):
            raise HTTPException(400, f"bad status filter {status!r}")
        entries = [e.export() for e in box.session.path.entries
                   if status == "all" or e.label.status == status]
        return {"entries": entries}

    @app.get("/sessions/{session_id}/entries/{t}")
    def get_entry(session_id: str, t: int):
        box = box_of(session_id)
        try:
            return box.session.path.entry(t).export()
        except UnknownEntryError as exc:
            raise HTTPException(404, str(exc)) from None

    @app.get("/sessions/{session_id}/hierarchy")
    def get_hierarchy(session_id: str):
        return box_of(session_id).session.path.hierarchy.view()

    @app.get("/sessions/{session_id}/pending")
    def get_pending(session_id: str):
        box = box_of(session_id)
        controller = box.session.controller
        if controller.pending is None:
            return {"pending": False, "culprits": []}
        return {"pending": True,
                "trigger": controller.pending.trigger,
                "culprits": controller.pending_culprit_view()}

    @app.post("/sessions/{session_id}/pending")
    def post_resolution(session_id: str, body: ResolveBody):
        box = box_of(session_id)
        with box.lock:
            try:
                report = box.session.resolve(body.retract)
            except (PendingRevisionError, InvalidChoiceError) as exc:
                raise HTTPException(409, str(exc)) from None
        return report.export()

    @app.get("/sessions/{session_id}/export/{what}")
    def get_export(session_id: str, what: str):
        box = box_of(session_id)
        if what == "journal":
            return PlainTextResponse(box.session.journal.dump(),
                                     media_type="application/x-ndjson")
        if what == "snapshot":
            return Response(box.session.snapshot_json(),
                            media_type="application/json")
        if what == "dot":
            return PlainTextResponse(box.session.path.hierarchy.to_dot(),
                                     media_type="text/vnd.graphviz")
        raise HTTPException(404, f"unknown export {what!r}")

    return app


def serve(port: int = 8000, data_dir: Optional[str] = None,
          host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="warning")
