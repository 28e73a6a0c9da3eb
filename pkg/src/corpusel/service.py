"""HTTP/JSON API over the engine, consumed by the browser UI and scripts.

Every response, success or error, carries a schema_version field; errors are
always {"error": {"code", "message"}} with code one of not_found,
invalid_input, conflict, internal. Mutations on a session are serialized by a
per-session lock; the graph and index are shared read-only.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import index as index_mod
from . import session as session_mod
from .errors import ConflictError, CorpuselError, RecordError, UnknownIdError
from .index import (
    DEFAULT_PREVIEW_LIMIT,
    DEFAULT_PREVIEW_WINDOW,
    CorpusIndex,
    build_index,
    load_snapshot,
)
from .ingest import parse_corpus
from .kb_graph import DEFAULT_MAX_DEPTH, KnowledgeGraph, load_graph
from .session import SessionState, Verdict
from .temporal_filter import Period

SCHEMA_VERSION = 1


@dataclass
class ServiceConfig:
    page_size: int = 10
    preview_limit: int = DEFAULT_PREVIEW_LIMIT
    preview_window: int = DEFAULT_PREVIEW_WINDOW
    typeahead_limit: int = 20
    default_max_depth: int = DEFAULT_MAX_DEPTH
    ui_dir: str | None = None


class PeriodBody(BaseModel):
    start_year: int
    end_year: int


class CreateSessionBody(BaseModel):
    roots: list[str]
    period: PeriodBody
    max_depth: int | None = Field(default=None, ge=1)


class ToggleBody(BaseModel):
    kind: str  # "category" | "entity"
    target: str
    reason: str | None = None


class AssessBody(BaseModel):
    doc_id: str
    verdict: str
    reason: str | None = None


class ExportBody(BaseModel):
    include_unjudged: bool = False


class SessionStore:
    """In-memory sessions with one mutation lock each."""

    def __init__(self):
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def add(self, state: SessionState) -> None:
        with self._registry_lock:
            self._sessions[state.session_id] = state
            self._locks[state.session_id] = threading.Lock()

    def get(self, session_id: str) -> tuple[SessionState, threading.Lock]:
        with self._registry_lock:
            if session_id not in self._sessions:
                raise UnknownIdError(session_id, f"unknown session: {session_id!r}")
            return self._sessions[session_id], self._locks[session_id]


def _ok(payload: dict, status_code: int = 200) -> JSONResponse:
    return JSONResponse({"schema_version": SCHEMA_VERSION, **payload}, status_code=status_code)


def _error(code: str, message: str, status_code: int) -> JSONResponse:
    return JSONResponse(
        {"schema_version": SCHEMA_VERSION, "error": {"code": code, "message": message}},
        status_code=status_code,
    )


def session_payload(
    state: SessionState, index: CorpusIndex, config: ServiceConfig
) -> dict:
    """Full session representation: the UI's single source of truth."""
    query = session_mod.effective_query(state)
    freq = index_mod.frequencies(index, state.tree.entities)
    previews: dict[str, list[dict]] = {}
    for snip in index_mod.preview(
        index, state.tree.entities, config.preview_limit, config.preview_window
    ):
        previews.setdefault(snip.entity, []).append({
            "doc_id": snip.doc_id,
            "snippet": snip.snippet,
            "mention_offset": snip.mention_offset,
        })
    groups = []
    for group in state.tree.groups:
        categories = []
        for node in group.categories:
            entities = []
            for cand in node.entities:
                row = freq.rows[cand.entity]
                entities.append({
                    "entity": cand.entity,
                    "label": cand.label,
                    "temporal_class": cand.temporal_class.value,
                    "selected": state.entity_selected[cand.entity],
                    "documents": row.documents,
                    "mentions": row.mentions,
                    "absent": row.absent,
                    "previews": previews.get(cand.entity, []),
                })
            decision = node.decision
            categories.append({
                "category": node.category,
                "label": node.label,
                "depth": node.depth,
                "selected": state.category_selected[node.category],
                "auto_selected": decision.auto_selected,
                "dated_member_count": decision.dated_member_count,
                "out_of_period_count": decision.out_of_period_count,
                "entities": entities,
            })
        groups.append({"root": group.root, "categories": categories})
    result_rows = index_mod.retrieve(index, query.entities)
    missing = sorted(session_mod.missing_entities(state, index))
    assessments = {d: v.value for d, v in sorted(state.doc_assessments.items())}
    return {
        "session": {
            "id": state.session_id,
            "roots": list(state.roots),
            "period": {"start_year": state.period.start_year,
                       "end_year": state.period.end_year},
            "max_depth": state.max_depth,
            "groups": groups,
            "effective_query": query.sorted(),
            "result_count": len(result_rows),
            "missing_entities": missing,
            "assessments": assessments,
            "relevant_count": sum(1 for v in state.doc_assessments.values()
                                  if v is Verdict.RELEVANT),
        }
    }


def build_app(
    graph: KnowledgeGraph,
    index: CorpusIndex,
    config: ServiceConfig | None = None,
) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="corpusel", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    store = SessionStore()
    app.state.graph = graph
    app.state.index = index
    app.state.sessions = store
    app.state.config = config

    @app.exception_handler(UnknownIdError)
    def _unknown(request: Request, exc: UnknownIdError):
        return _error("not_found", str(exc), 404)

    @app.exception_handler(ConflictError)
    def _conflict(request: Request, exc: ConflictError):
        return _error("conflict", str(exc), 409)

    @app.exception_handler(RecordError)
    def _record(request: Request, exc: RecordError):
        return _error("invalid_input", str(exc), 400)

    @app.exception_handler(ValueError)
    def _value(request: Request, exc: ValueError):
        return _error("invalid_input", str(exc), 400)

    @app.exception_handler(RequestValidationError)
    def _validation(request: Request, exc: RequestValidationError):
        return _error("invalid_input", str(exc.errors()), 400)

    @app.exception_handler(StarletteHTTPException)
    def _http(request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "invalid_input"
        if exc.status_code >= 500:
            code = "internal"
        return _error(code, str(exc.detail), exc.status_code)

    @app.exception_handler(CorpuselError)
    def _corpusel(request: Request, exc: CorpuselError):
        return _error("internal", str(exc), 500)

    @app.exception_handler(Exception)
    def _internal(request: Request, exc: Exception):
        return _error("internal", f"{type(exc).__name__}: {exc}", 500)

    @app.get("/health")
    def health():
        return _ok({
            "status": "ok",
            "documents": index.n_documents,
            "entities": len(graph.entities),
            "categories": len(graph.categories),
        })

    @app.get("/categories")
    def categories(q: str = ""):
        needle = q.strip().lower()
        matches = []
        if needle:
            for cid, label in graph.categories.items():
                display = label or cid
                if needle in display.lower():
                    matches.append({"id": cid, "label": display})
            matches.sort(key=lambda m: (m["label"].lower(), m["id"]))
            matches = matches[: config.typeahead_limit]
        return _ok({"matches": matches})

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        period = Period(body.period.start_year, body.period.end_year)
        state = session_mod.create_session(
            graph, body.roots, period, body.max_depth or config.default_max_depth,
        )
        store.add(state)
        return _ok(session_payload(state, index, config), status_code=201)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        state, _ = store.get(session_id)
        return _ok(session_payload(state, index, config))

    @app.post("/sessions/{session_id}/toggle")
    def toggle(session_id: str, body: ToggleBody):
        state, lock = store.get(session_id)
        with lock:
            if body.kind == "category":
                session_mod.toggle_category(state, body.target, body.reason)
            elif body.kind == "entity":
                session_mod.toggle_entity(state, body.target, body.reason)
            else:
                raise ValueError(f"kind must be 'category' or 'entity', got {body.kind!r}")
            return _ok(session_payload(state, index, config))

    @app.get("/sessions/{session_id}/results")
    def results(session_id: str, page: int = 1):
        if page < 1:
            raise ValueError(f"page must be >= 1, got {page}")
        state, _ = store.get(session_id)
        query = session_mod.effective_query(state)
        rows = index_mod.retrieve(index, query.entities)
        start = (page - 1) * config.page_size
        page_rows = rows[start : start + config.page_size]
        documents = []
        for row in page_rows:
            doc = index.doc_store[row.doc_id]
            verdict = state.doc_assessments.get(row.doc_id, Verdict.UNJUDGED)
            documents.append({
                "doc_id": doc.doc_id,
                "date": doc.date.isoformat(),
                "speaker": doc.speaker,
                "party": doc.party,
                "debate_title": doc.debate_title,
                "text": doc.text,
                "verdict": verdict.value,
                "matched_entities": sorted(row.matched_entities),
                "mention_count": row.mention_count,
                "annotations": [
                    {"entity": a.entity, "begin": a.begin, "end": a.end, "surface": a.surface}
                    for a in doc.annotations if a.entity in query
                ],
            })
        return _ok({
            "session_id": session_id,
            "page": page,
            "page_size": config.page_size,
            "total_documents": len(rows),
            "total_pages": (len(rows) + config.page_size - 1) // config.page_size,
            "documents": documents,
        })

    @app.post("/sessions/{session_id}/assess")
    def assess(session_id: str, body: AssessBody):
        state, lock = store.get(session_id)
        with lock:
            session_mod.assess_document(state, index, body.doc_id, body.verdict, body.reason)
        return _ok({
            "session_id": session_id,
            "doc_id": body.doc_id,
            "verdict": body.verdict,
            "relevant_count": sum(1 for v in state.doc_assessments.values()
                                  if v is Verdict.RELEVANT),
        })

    @app.get("/sessions/{session_id}/aggregate")
    def aggregate(session_id: str, dimension: str = "year"):
        state, _ = store.get(session_id)
        query = session_mod.effective_query(state)
        grouped = index_mod.aggregate(index, query.entities, dimension)
        rows = [
            {"key": key, "documents": docs, "mentions": mentions}
            for key, (docs, mentions) in grouped.items()
        ]
        return _ok({"session_id": session_id, "dimension": dimension, "rows": rows})

    @app.get("/sessions/{session_id}/missing")
    def missing(session_id: str):
        state, _ = store.get(session_id)
        return _ok({
            "session_id": session_id,
            "missing_entities": sorted(session_mod.missing_entities(state, index)),
        })

    @app.post("/sessions/{session_id}/export")
    def export(session_id: str, body: ExportBody):
        state, lock = store.get(session_id)
        with lock:
            content = session_mod.export_corpus(state, index, body.include_unjudged)
        return PlainTextResponse(
            content,
            media_type="application/x-ndjson",
            headers={
                "Content-Disposition":
                    f'attachment; filename="corpus-export-{session_id}.jsonl"',
            },
        )

    if config.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def load_engine(
    nodes_path: str,
    edges_path: str,
    corpus_path: str | None = None,
    snapshot_path: str | None = None,
) -> tuple[KnowledgeGraph, CorpusIndex]:
    """Load the graph plus an index from either a corpus file or a snapshot."""
    with open(nodes_path, "r", encoding="utf-8") as nodes, \
            open(edges_path, "r", encoding="utf-8") as edges:
        graph = load_graph(nodes, edges)
    if snapshot_path:
        corpus_index = load_snapshot(snapshot_path)
    elif corpus_path:
        with open(corpus_path, "r", encoding="utf-8") as fh:
            docs, _ = parse_corpus(fh)
        corpus_index = build_index(docs)
    else:
        raise ValueError("either a corpus file or an index snapshot is required")
    return graph, corpus_index


def serve(
    graph: KnowledgeGraph,
    index: CorpusIndex,
    host: str = "127.0.0.1",
    port: int = 8000,
    config: ServiceConfig | None = None,
) -> None:
    import uvicorn

    app = build_app(graph, index, config)
    uvicorn.run(app, host=host, port=port, log_level="info")
