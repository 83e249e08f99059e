"""HTTP service over corpora, strategical diagrams and discovery sessions.

Endpoint surface:

    POST /corpora                    multipart upload; starts analysis
    GET  /corpora/{id}               corpus summary
    GET  /corpora/{id}/diagram       diagram export (?format=...)
    POST /sessions                   open a discovery session
    GET  /sessions/{id}              session view
    POST /sessions/{id}/actions      mark | attach | targets | suggest

Handlers are stateless adapters over a pluggable store (memory or
disk); every response carries ``schema`` and ``schema_version`` fields.
Analysis runs off the upload request: the diagram resource starts in
``pending`` state and moves to ``ready`` or ``failed`` exactly once.
Per-session mutations are serialized by session id.  Unknown fields in
request bodies are ignored; outputs never carry undocumented fields.

Error mapping: malformed uploads 400, oversize bodies 413, unknown
resources 404, workflow-order violations and semantically invalid
actions 422, diagrams that failed to build 500 (with detail).
"""

from __future__ import annotations

import json
import os
import threading
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, Request, UploadFile
from fastapi.responses import JSONResponse, Response

from .diagram import (
    CdrUndefined,
    UnknownFormat,
    export_diagram,
    import_diagram,
    locate_term,
    suggest_intermediates,
)
from .discovery import (
    InvalidIntermediate,
    MissingCorpus,
    SourceTermAbsent,
    UnknownIntermediate,
    UnknownTerm,
    _session_payload,
    attach_intermediate_corpus,
    bind_corpus,
    candidate_targets,
    create_session,
    load_session,
    mark_intermediate,
    save_session,
)
from .medline import EmptyCorpus, corpus_from_dict, corpus_to_dict, decode_source, load_corpus
from .pipeline import AnalysisConfig, analyze, config_from_params, config_to_params
from .store import DiskStore, MemoryStore

__all__ = ["ServerConfig", "load_config", "create_app", "main"]

SCHEMA_VERSION = 1

_SERVABLE_FORMATS = ("structured-document", "canonical-table")


@dataclass
class ServerConfig:
    """Deployment knobs; file values are overridden by environment."""

    port: int = 8034
    store_path: str | None = None  # None selects the in-memory store
    body_limit: int = 8 * 1024 * 1024
    analysis_mode: str = "thread"  # thread | inline | manual

    def __post_init__(self):
        if self.port < 1 or self.port > 65535:
            raise ValueError(f"port out of range: {self.port}")
        if self.body_limit < 1:
            raise ValueError("body_limit must be positive")
        if self.analysis_mode not in ("thread", "inline", "manual"):
            raise ValueError(f"unknown analysis mode {self.analysis_mode!r}")


def load_config(path: str | None = None, env=None) -> ServerConfig:
    """Config file (JSON) plus environment overrides.

    The file location itself may come from MESHLINK_CONFIG; individual
    values from MESHLINK_PORT, MESHLINK_STORE_PATH, MESHLINK_BODY_LIMIT
    and MESHLINK_ANALYSIS_MODE.  Environment wins over file, file over
    defaults.
    """
    env = os.environ if env is None else env
    data: dict = {}
    config_path = path or env.get("MESHLINK_CONFIG")
    if config_path:
        data = json.loads(Path(config_path).read_text(encoding="utf-8"))
    return ServerConfig(
        port=int(env.get("MESHLINK_PORT", data.get("port", 8034))),
        store_path=env.get("MESHLINK_STORE_PATH", data.get("store_path")),
        body_limit=int(env.get("MESHLINK_BODY_LIMIT", data.get("body_limit", 8 * 1024 * 1024))),
        analysis_mode=env.get("MESHLINK_ANALYSIS_MODE", data.get("analysis_mode", "thread")),
    )


def _json_bytes(document: dict) -> bytes:
    return (json.dumps(document, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


class AnalysisRunner:
    """Drives pending diagram resources to ready or failed, exactly once.

    ``thread`` mode runs each analysis on a daemon thread, ``inline``
    completes it before the upload response returns, and ``manual``
    queues work until run_pending() -- the latter exists so tests can
    observe the pending state deterministically.
    """

    def __init__(self, store, mode: str):
        self.store = store
        self.mode = mode
        self._queue: deque[str] = deque()

    def submit(self, corpus_id: str) -> None:
        if self.mode == "manual":
            self._queue.append(corpus_id)
        elif self.mode == "inline":
            self._run(corpus_id)
        else:
            threading.Thread(target=self._run, args=(corpus_id,), daemon=True).start()

    def run_pending(self) -> int:
        done = 0
        while self._queue:
            self._run(self._queue.popleft())
            done += 1
        return done

    def set_state(self, corpus_id: str, state: str, error: str | None = None) -> None:
        document = {"schema": "diagram-state", "schema_version": SCHEMA_VERSION, "state": state}
        if error is not None:
            document["error"] = error
        self.store.put("diagrams", f"{corpus_id}.state", _json_bytes(document))

    def _run(self, corpus_id: str) -> None:
        try:
            envelope = json.loads(self.store.get("corpora", corpus_id).decode("utf-8"))
            corpus = corpus_from_dict(envelope["corpus"])
            config = config_from_params(envelope["params"])
            result = analyze(corpus, config)
            if result.diagram is None:
                self.set_state(corpus_id, "failed", "corpus yields no clusters")
                return
            payload = export_diagram(result.diagram, "structured-document")
            # payload lands before the state flip: a ready state never
            # points at a missing payload
            self.store.put("diagrams", f"{corpus_id}.payload", payload)
            self.set_state(corpus_id, "ready")
        except Exception as exc:  # noqa: BLE001 - failures become resource state
            self.set_state(corpus_id, "failed", str(exc))


def _merged_params(overrides: dict | None) -> dict:
    params = config_to_params(AnalysisConfig())
    if overrides:
        params.update({k: v for k, v in overrides.items() if k in params})
    return params


class _SessionLocks:
    def __init__(self):
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def for_id(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())


def create_app(store=None, config: ServerConfig | None = None) -> FastAPI:
    """Assemble the application around a store and a configuration."""
    config = config or ServerConfig()
    if store is None:
        store = DiskStore(config.store_path) if config.store_path else MemoryStore()
    runner = AnalysisRunner(store, config.analysis_mode)
    locks = _SessionLocks()

    app = FastAPI(title="meshlink", version="1")
    app.state.store = store
    app.state.config = config
    app.state.runner = runner

    # -- helpers ----------------------------------------------------------

    def corpus_envelope_or_404(corpus_id: str) -> dict:
        data = store.get("corpora", corpus_id)
        if data is None:
            raise HTTPException(404, f"unknown corpus {corpus_id!r}")
        return json.loads(data.decode("utf-8"))

    def corpus_envelope_or_422(corpus_id: str) -> dict:
        data = store.get("corpora", corpus_id)
        if data is None:
            raise HTTPException(422, f"corpus {corpus_id!r} is not in the store")
        return json.loads(data.decode("utf-8"))

    def corpus_for_action(corpus_id: str):
        return corpus_from_dict(corpus_envelope_or_422(corpus_id)["corpus"])

    def session_or_404(session_id: str):
        data = store.get("sessions", session_id)
        if data is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return load_session(data)

    def session_view(session) -> dict:
        return {
            "schema": "discovery-session",
            "schema_version": SCHEMA_VERSION,
            **_session_payload(session),
        }

    def bind_referenced_corpora(session):
        wanted = {session.source.corpus_id}
        wanted.update(e.corpus_id for e in session.intermediates if e.corpus_id)
        for corpus_id in sorted(wanted):
            session = bind_corpus(session, corpus_for_action(corpus_id))
        return session

    # -- corpora ----------------------------------------------------------

    @app.post("/corpora", status_code=201)
    def upload_corpus(
        file: UploadFile = File(...),
        label: str | None = Form(None),
        params: str | None = Form(None),
    ):
        raw = file.file.read(config.body_limit + 1)
        if len(raw) > config.body_limit:
            raise HTTPException(413, f"body exceeds limit of {config.body_limit} bytes")
        if params is not None:
            try:
                overrides = json.loads(params)
            except json.JSONDecodeError as exc:
                raise HTTPException(400, f"params is not valid JSON: {exc}")
            if not isinstance(overrides, dict):
                raise HTTPException(400, "params must be a JSON object")
        else:
            overrides = None
        try:
            corpus = load_corpus(
                [decode_source(raw)],
                label=label or (file.filename or "upload"),
                provenance={"filename": file.filename},
            )
        except EmptyCorpus as exc:
            raise HTTPException(400, str(exc))
        merged = _merged_params(overrides)
        try:
            config_from_params(merged)  # reject unusable parameter values early
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(400, f"unusable analysis parameters: {exc}")
        envelope = {
            "schema": "stored-corpus",
            "schema_version": SCHEMA_VERSION,
            "corpus_id": corpus.corpus_id,
            "params": merged,
            "corpus": corpus_to_dict(corpus),
        }
        store.put("corpora", corpus.corpus_id, _json_bytes(envelope))
        runner_state = store.get("diagrams", f"{corpus.corpus_id}.state")
        # re-uploading identical content re-runs analysis only if it never completed
        already_ready = runner_state is not None and json.loads(runner_state).get("state") == "ready"
        if not already_ready:
            runner.set_state(corpus.corpus_id, "pending")
            runner.submit(corpus.corpus_id)
        return {
            "schema": "corpus-upload",
            "schema_version": SCHEMA_VERSION,
            "corpus_id": corpus.corpus_id,
            "diagram_id": corpus.corpus_id,
        }

    @app.get("/corpora/{corpus_id}")
    def get_corpus(corpus_id: str):
        envelope = corpus_envelope_or_404(corpus_id)
        corpus = corpus_from_dict(envelope["corpus"])
        return {
            "schema": "corpus-summary",
            "schema_version": SCHEMA_VERSION,
            "corpus_id": corpus.corpus_id,
            "label": corpus.label,
            "documents": len(corpus.documents),
            "terms": len(corpus.vocabulary()),
            "params": envelope["params"],
            "provenance": corpus.provenance,
        }

    @app.get("/corpora/{corpus_id}/diagram")
    def get_diagram(corpus_id: str, format: str = "structured-document"):
        state_data = store.get("diagrams", f"{corpus_id}.state")
        if state_data is None:
            raise HTTPException(404, f"no diagram for corpus {corpus_id!r}")
        if format not in _SERVABLE_FORMATS:
            raise HTTPException(422, f"unsupported format {format!r}")
        state = json.loads(state_data.decode("utf-8"))
        if state["state"] == "pending":
            return JSONResponse(
                status_code=409,
                content={"detail": "analysis still running", "state": "pending"},
                headers={"Retry-After": "1"},
            )
        if state["state"] == "failed":
            return JSONResponse(
                status_code=500,
                content={"detail": state.get("error", "analysis failed"), "state": "failed"},
            )
        payload = store.get("diagrams", f"{corpus_id}.payload")
        if format == "structured-document":
            return Response(content=payload, media_type="application/json")
        rendered = export_diagram(import_diagram(payload), format)
        return Response(content=rendered, media_type="text/tab-separated-values")

    # -- sessions ---------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def open_session(body: dict):
        corpus_id = body.get("corpus_id")
        term = body.get("term")
        if not corpus_id or not term:
            raise HTTPException(422, "body requires corpus_id and term")
        envelope = corpus_envelope_or_422(corpus_id)
        corpus = corpus_from_dict(envelope["corpus"])
        params = dict(envelope["params"])
        if isinstance(body.get("params"), dict):
            params.update({k: v for k, v in body["params"].items() if k in params})
        try:
            session = create_session(corpus, term, config_from_params(params))
        except UnknownTerm as exc:
            raise HTTPException(422, str(exc))
        except ValueError as exc:  # corpus yields no clusters
            raise HTTPException(422, str(exc))
        store.put("sessions", session.session_id, save_session(session))
        return session_view(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_view(session_or_404(session_id))

    @app.post("/sessions/{session_id}/actions")
    def session_action(session_id: str, body: dict):
        action = body.get("action")
        with locks.for_id(session_id):
            session = session_or_404(session_id)
            extra: dict = {}
            try:
                if action == "mark":
                    session = mark_intermediate(session, _required(body, "descriptor"))
                elif action == "attach":
                    corpus = corpus_for_action(_required(body, "corpus_id"))
                    try:
                        session = attach_intermediate_corpus(
                            session, _required(body, "descriptor"), corpus
                        )
                    except ValueError as exc:  # corpus yields no clusters
                        raise HTTPException(422, str(exc))
                elif action == "targets":
                    session = bind_referenced_corpora(session)
                    session, _candidates = candidate_targets(
                        session, _required(body, "descriptor"), strict=bool(body.get("strict"))
                    )
                    extra["targets"] = _session_payload(session)["target_candidates"]
                elif action == "suggest":
                    source = session.source
                    cluster = locate_term(source.diagram, source.descriptor)
                    if cluster is None:
                        raise HTTPException(
                            422, f"source descriptor {source.descriptor!r} is in no cluster"
                        )
                    band = session.config.band
                    if isinstance(body.get("band"), (list, tuple)) and len(body["band"]) == 2:
                        band = (float(body["band"][0]), float(body["band"][1]))
                    try:
                        suggestions = suggest_intermediates(source.diagram, cluster, band=band)
                    except ValueError as exc:
                        raise HTTPException(422, str(exc))
                    extra["suggestions"] = [
                        {
                            "cluster_id": s.cluster.cluster_id,
                            "label": s.cluster.label,
                            "score": s.score,
                            "sir": s.sir.ratio if s.sir is not None else None,
                            "flags": list(s.flags),
                        }
                        for s in suggestions
                    ]
                else:
                    raise HTTPException(422, f"unknown action {action!r}")
            except (
                UnknownIntermediate,
                InvalidIntermediate,
                SourceTermAbsent,
                MissingCorpus,
                CdrUndefined,
                UnknownTerm,
            ) as exc:
                raise HTTPException(422, str(exc))
            if action in ("mark", "attach", "targets"):
                store.put("sessions", session.session_id, save_session(session))
        view = session_view(session)
        view.update(extra)
        return view

    @app.exception_handler(UnknownFormat)
    def _unknown_format(_request: Request, exc: UnknownFormat):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    return app


def _required(body: dict, key: str) -> str:
    value = body.get(key)
    if not value:
        raise HTTPException(422, f"action requires {key!r}")
    return value


def main(argv=None) -> int:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="Serve the analysis and discovery API.")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--port", type=int, default=None, help="override the configured port")
    parser.add_argument("--store", default=None, help="override the configured store path")
    args = parser.parse_args(argv)

    config = load_config(args.config)
    if args.port is not None:
        config.port = args.port
    if args.store is not None:
        config.store_path = args.store
    app = create_app(config=config)
    uvicorn.run(app, host="127.0.0.1", port=config.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
