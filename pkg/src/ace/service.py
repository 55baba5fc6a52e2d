"""HTTP face of the engine: REST-ish resources over the persisted documents.

Request and response bodies are the same JSON documents the store persists,
so there is no second schema to drift. Domain errors surface as
``{"error": {"code", "message"}}`` with the error's HTTP status; the codes
are frozen strings.
"""

from __future__ import annotations

import socket
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import errors
from .config import Config, split_bind_addr
from .engine import Engine


def _field(payload, key, expected=str, required=True, default=None):
    payload = payload or {}
    value = payload.get(key)
    if value is None:
        if required:
            raise errors.InvalidRequest(f"missing field {key!r}")
        return default
    if expected is not None and not isinstance(value, expected):
        raise errors.InvalidRequest(f"field {key!r} must be {expected.__name__}")
    return value


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="ace", docs_url=None, redoc_url=None)

    @app.exception_handler(errors.AceError)
    async def _domain_error(request, exc: errors.AceError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "invalid_request", "message": str(exc)}},
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    # -- projects ---------------------------------------------------------

    @app.post("/projects")
    def create_project(payload: Optional[dict] = Body(None)):
        name = _field(payload, "name")
        brief = _field(payload, "brief", required=False, default="")
        return engine.create_project(name, brief).to_doc()

    @app.get("/projects")
    def list_projects():
        return [p.to_doc() for p in engine.store.list_projects()]

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        return engine.store.get_project(project_id).to_doc()

    @app.get("/projects/{project_id}/cycles")
    def design_cycles(project_id: str):
        return engine.store.design_cycles(project_id)

    # -- elicitation ----------------------------------------------------------

    @app.post("/projects/{project_id}/elicitation")
    def start_elicitation(project_id: str):
        return engine.start_elicitation(project_id).to_doc()

    @app.post("/projects/{project_id}/elicitation/{session_id}/messages")
    def elicitation_message(
        project_id: str, session_id: str, payload: Optional[dict] = Body(None)
    ):
        text = _field(payload, "text")
        reply = engine.elicitation_message(session_id, text)
        return {"reply": reply, "session": engine.elicitor.get_session(session_id).to_doc()}

    @app.post("/projects/{project_id}/elicitation/{session_id}/finalize")
    def elicitation_finalize(project_id: str, session_id: str):
        draft = engine.elicitation_finalize(session_id)
        return {"draft": draft, "session": engine.elicitor.get_session(session_id).to_doc()}

    # -- versions ----------------------------------------------------------------

    @app.post("/projects/{project_id}/versions")
    def commit_version(project_id: str, payload: Optional[dict] = Body(None)):
        body = _field(payload, "body")
        origin = _field(payload, "origin", required=False, default="manual")
        parent_id = _field(payload, "parent_id", required=False)
        return engine.commit_version(project_id, body, origin, parent_id).to_doc()

    @app.get("/projects/{project_id}/versions")
    def list_versions(project_id: str):
        return [v.to_doc() for v in engine.store.versions_of(project_id)]

    @app.get("/versions/{version_id}")
    def get_version(version_id: str):
        return engine.store.get_version(version_id).to_doc()

    @app.post("/versions/{version_id}/revert")
    def revert(version_id: str):
        return engine.revert(version_id).to_doc()

    @app.get("/versions/{version_id}/lineage")
    def lineage(version_id: str):
        return [v.to_doc() for v in engine.lineage(version_id)]

    @app.get("/versions/{version_id}/diff/{other_id}")
    def diff(version_id: str, other_id: str):
        return {"diff": engine.diff(version_id, other_id)}

    @app.get("/versions/{version_id}/analysis")
    def analysis(version_id: str, mode: str = "heuristic"):
        return engine.analyze_version(version_id, mode=mode)

    # -- test sessions ---------------------------------------------------------------

    @app.post("/projects/{project_id}/sessions")
    def start_session(project_id: str, payload: Optional[dict] = Body(None)):
        version_id = _field(payload, "prompt_version_id")
        version = engine.store.get_version(version_id)
        if version.project_id != project_id:
            raise errors.UnknownVersion(
                f"version {version_id!r} is not in project {project_id!r}"
            )
        return engine.start_session(version_id).to_doc()

    @app.post("/sessions/{session_id}/turns")
    def user_turn(session_id: str, payload: Optional[dict] = Body(None)):
        text = _field(payload, "text")
        return {"utterance": engine.user_turn(session_id, text)}

    @app.post("/sessions/{session_id}/end")
    def end_session(session_id: str):
        return engine.end_session(session_id)

    @app.get("/transcripts/{transcript_id}")
    def get_transcript(transcript_id: str):
        return engine.store.get_transcript(transcript_id)

    # -- annotations ----------------------------------------------------------------------

    @app.post("/transcripts/{transcript_id}/annotations")
    def add_annotation(transcript_id: str, payload: Optional[dict] = Body(None)):
        span = _field(payload, "span", expected=dict)
        tags = _field(payload, "tags", expected=list)
        comment = _field(payload, "comment", required=False)
        annotation = engine.add_annotation(
            transcript_id,
            _field(span, "utterance_index", expected=int),
            _field(span, "start", expected=int),
            _field(span, "end", expected=int),
            tags,
            comment,
        )
        return annotation.to_doc()

    @app.get("/transcripts/{transcript_id}/annotations")
    def list_annotations(transcript_id: str):
        return engine.list_annotations(transcript_id)

    @app.get("/transcripts/{transcript_id}/conflicts")
    def conflicts(transcript_id: str):
        return engine.conflicts(transcript_id)

    @app.get("/transcripts/{transcript_id}/digest")
    def digest(transcript_id: str):
        return {"digest": engine.feedback_digest(transcript_id)}

    # -- refinement -------------------------------------------------------------------------

    @app.post("/versions/{version_id}/suggestions")
    def suggestions(version_id: str, payload: Optional[dict] = Body(None)):
        transcript_id = _field(payload, "transcript_id")
        return engine.generate_suggestions(version_id, transcript_id)

    @app.get("/suggestions/{suggestion_set_id}")
    def get_suggestions(suggestion_set_id: str):
        return engine.store.get_suggestions(suggestion_set_id)

    @app.post("/suggestions/{suggestion_set_id}/edit")
    def edit_suggestions(suggestion_set_id: str, payload: Optional[dict] = Body(None)):
        edits = _field(payload, "edits", expected=dict)
        return engine.edit_suggestions(suggestion_set_id, edits)

    @app.post("/versions/{version_id}/refine")
    def refine(version_id: str, payload: Optional[dict] = Body(None)):
        suggestion_set_id = _field(payload, "suggestion_set_id")
        return engine.generate_refined_prompt(version_id, suggestion_set_id)

    @app.get("/drafts/{draft_id}")
    def get_draft(draft_id: str):
        return engine.store.get_draft(draft_id)

    @app.post("/drafts/{draft_id}/commit")
    def commit_draft(draft_id: str, payload: Optional[dict] = Body(None)):
        edited_body = _field(payload, "edited_body", required=False)
        return engine.commit_refinement(draft_id, edited_body).to_doc()

    return app


def check_store_writable(store_path: str) -> None:
    path = Path(store_path)
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-probe"
        probe.write_text("", encoding="utf-8")
        probe.unlink()
    except OSError as exc:
        raise errors.StoreError(f"store path {store_path!r} not writable: {exc}")


def serve(config: Config, engine: Optional[Engine] = None):
    """Run the HTTP service until interrupted."""
    import uvicorn

    check_store_writable(config.store_path)
    host, port = split_bind_addr(config.bind_addr)
    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
        probe.close()
    except OSError as exc:
        raise errors.BindError(f"cannot bind {config.bind_addr}: {exc}")
    app = create_app(engine or Engine.from_config(config))
    uvicorn.run(app, host=host, port=port, log_level="warning")
