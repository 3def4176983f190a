"""HTTP/JSON service exposing the engine to the browser UI.

Demo-grade service: NO authentication and no TLS; run it only on localhost
or behind your own proxy. All state is an in-memory LRU session store
(export-before-evict), so restarts lose sessions unless an export spool
directory is configured.

Endpoints (all under /api):

* ``GET  /api/health``
* ``POST /api/datasets``                          raw CSV body -> dataset id + schema
* ``POST /api/sessions``                          {dataset_id, config?, specs?, targets?, min_support?}
* ``GET  /api/sessions/{id}/anomalies?top_k=``    ranked groups + records
* ``GET  /api/sessions/{id}/summary``             per-attribute anomaly summary
* ``GET  /api/sessions/{id}/chart?group_by=&target=&kind=&mode=``
* ``POST /api/sessions/{id}/suggestions``         {record} -> ordered repair actions
* ``POST /api/sessions/{id}/preview``             {action} -> diff without committing
* ``POST /api/sessions/{id}/actions``             {action} -> commit
* ``POST /api/sessions/{id}/undo`` / ``/redo``
* ``GET  /api/sessions/{id}/script``              standalone replay script
* ``GET  /api/sessions/{id}/export``              replayable session export
* ``GET  /api/sessions/{id}/table?format=csv``    current table

Environment variables: ``PORT``, ``MAX_UPLOAD_BYTES``, ``EMBEDDING_ENDPOINT``,
``CORS_ORIGINS`` (comma-separated allow-list), ``SESSION_CAP``,
``EXPORT_DIR``.
"""

from __future__ import annotations

import json
import logging
import math
import os
import threading
import uuid
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import httpx
from fastapi import FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .anomalies import DetectorConfig
from .codegen import generate_script
from .errors import WrangleError
from .groups import enumerate_all_specs
from .insight import attribute_summary, chart_payload, rank_groups
from .repairs import key_similarity, suggest_repairs
from .schemas import (
    action_from_json,
    action_to_json,
    group_id_to_json,
    record_from_json,
    record_to_json,
    spec_from_json,
)
from .session import Session, counts_by_type
from .table import LoadOptions, Table, infer_kinds, load_csv, serialize_csv

log = logging.getLogger("wranglekit.server")

_STATUS_BY_CODE = {
    "MALFORMED_CSV": 400,
    "EMPTY_INPUT": 400,
    "RULE_SYNTAX": 400,
    "RULE_TYPE": 400,
    "RECIPE_SCHEMA": 400,
    "UNSUPPORTED_KIND": 400,
    "COLUMN_NOT_FOUND": 422,
    "KIND_MISMATCH": 422,
    "NO_CATEGORICAL_COLUMNS": 422,
    "NO_NUMERIC_COLUMNS": 422,
    "NOT_CONVERTIBLE": 422,
    "EMPTY_MEAN_BASIS": 422,
    "NO_SUGGESTION": 422,
    "UNSUPPORTED_ACTION": 422,
    "STALE_GROUP": 409,
    "STALE_ACTION": 409,
    "STALE_RECORD": 409,
    "NOTHING_TO_UNDO": 409,
    "NOTHING_TO_REDO": 409,
}


@dataclass
class ServerConfig:
    port: int = 8199
    max_upload_bytes: int = 25 * 1024 * 1024
    cors_origins: list = field(default_factory=lambda: ["http://localhost:5173", "http://127.0.0.1:5173"])
    session_cap: int = 32
    export_dir: Optional[str] = None
    embedding_endpoint: Optional[str] = None

    @classmethod
    def from_env(cls, **overrides) -> "ServerConfig":
        cfg = cls(**overrides)
        if "PORT" in os.environ:
            cfg.port = int(os.environ["PORT"])
        if "MAX_UPLOAD_BYTES" in os.environ:
            cfg.max_upload_bytes = int(os.environ["MAX_UPLOAD_BYTES"])
        if "CORS_ORIGINS" in os.environ:
            cfg.cors_origins = [o.strip() for o in os.environ["CORS_ORIGINS"].split(",") if o.strip()]
        if "SESSION_CAP" in os.environ:
            cfg.session_cap = int(os.environ["SESSION_CAP"])
        if "EXPORT_DIR" in os.environ:
            cfg.export_dir = os.environ["EXPORT_DIR"]
        if "EMBEDDING_ENDPOINT" in os.environ:
            cfg.embedding_endpoint = os.environ["EMBEDDING_ENDPOINT"]
        return cfg


class ApiError(Exception):
    """HTTP-facing error: status code plus machine code and message."""

    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail

    @classmethod
    def from_engine(cls, exc: WrangleError) -> "ApiError":
        status = _STATUS_BY_CODE.get(exc.code, 500)
        return cls(status, exc.code, str(exc))

    def response(self) -> JSONResponse:
        body = {"error": {"code": self.code, "message": self.message}}
        if self.detail is not None:
            body["error"]["detail"] = self.detail
        return JSONResponse(status_code=self.status, content=body)


@dataclass
class _SessionBox:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """LRU-bounded session map; evicted sessions are exported first when an
    export directory is configured."""

    def __init__(self, cap: int, export_dir: Optional[str] = None):
        self.cap = cap
        self.export_dir = export_dir
        self._boxes: OrderedDict[str, _SessionBox] = OrderedDict()
        self._lock = threading.Lock()

    def put(self, session: Session) -> None:
        with self._lock:
            self._boxes[session.id] = _SessionBox(session)
            self._boxes.move_to_end(session.id)
            while len(self._boxes) > self.cap:
                evicted_id, box = self._boxes.popitem(last=False)
                self._export_evicted(evicted_id, box.session)

    def get(self, session_id: str) -> _SessionBox:
        with self._lock:
            box = self._boxes.get(session_id)
            if box is None:
                raise ApiError(404, "SESSION_NOT_FOUND", f"no session {session_id!r}")
            self._boxes.move_to_end(session_id)
            return box

    def _export_evicted(self, session_id: str, session: Session) -> None:
        if not self.export_dir:
            log.warning("evicting session %s without export (EXPORT_DIR unset)", session_id)
            return
        os.makedirs(self.export_dir, exist_ok=True)
        path = os.path.join(self.export_dir, f"session-{session_id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(session.export(), fh)
        log.info("exported evicted session %s to %s", session_id, path)


def embedding_client(endpoint: str, keys: list[str], timeout: float = 5.0) -> dict[str, list[float]]:
    """Fetch embedding vectors for group keys from an external service.

    Wire format: ``POST endpoint {"keys": [...]}`` returning
    ``{"vectors": {key: [floats]}}``. Raises httpx errors on failure; the
    similarity wrapper below turns those into a fallback, never a fault.
    """
    response = httpx.post(endpoint, json={"keys": keys}, timeout=timeout)
    response.raise_for_status()
    payload = response.json()
    return {k: [float(x) for x in v] for k, v in payload["vectors"].items()}


def make_embedding_similarity(endpoint: Optional[str]) -> Callable[[str, str], float]:
    """Similarity function backed by the embedding service, with the
    deterministic default as fallback on any failure."""
    if not endpoint:
        return key_similarity

    @lru_cache(maxsize=4096)
    def _fetch_pair(a: str, b: str) -> Optional[float]:
        try:
            vectors = embedding_client(endpoint, [a, b])
            va, vb = vectors[a], vectors[b]
        except Exception as exc:  # network/timeout/shape: fall back, never fail
            log.warning("embedding service failed (%s); using default similarity", exc)
            return None
        dot = sum(x * y for x, y in zip(va, vb))
        norm = math.sqrt(sum(x * x for x in va)) * math.sqrt(sum(y * y for y in vb))
        if norm == 0:
            return None
        return (1.0 + dot / norm) / 2.0

    def similarity(a: str, b: str) -> float:
        first, second = (a, b) if a <= b else (b, a)
        score = _fetch_pair(first, second)
        if score is None:
            return key_similarity(a, b)
        return score

    return similarity


def _counts_json(counts: dict) -> dict:
    return {t.to_string(): n for t, n in sorted(counts.items(), key=lambda kv: kv[0].sort_key())}


def _ranked_json(ranked) -> list[dict]:
    return [
        {
            "group": group_id_to_json(r.group_id),
            "total_anomalies": r.total_anomalies,
            "per_type": _counts_json(r.per_type),
            "dominant_type": r.dominant_type.to_string(),
        }
        for r in ranked
    ]


def _preview_json(diff) -> dict:
    return {
        "cells_changed": diff.cells_changed,
        "rows_removed": diff.rows_removed,
        "affected_groups": [group_id_to_json(g) for g in diff.affected_groups],
        "mean_shift_per_group": [
            {"group": group_id_to_json(g), "shift": shift}
            for g, shift in diff.mean_shift_per_group.items()
        ],
        "anomalies_before": _counts_json(diff.anomalies_before),
        "anomalies_after": _counts_json(diff.anomalies_after),
    }


def create_app(config: Optional[ServerConfig] = None) -> FastAPI:
    config = config or ServerConfig.from_env()
    app = FastAPI(title="wranglekit", version=__version__, docs_url="/api/docs", openapi_url="/api/openapi.json")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.config = config
    app.state.datasets: dict[str, tuple[Table, LoadOptions]] = {}
    app.state.store = SessionStore(config.session_cap, config.export_dir)
    app.state.similarity = make_embedding_similarity(config.embedding_endpoint)

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(WrangleError)
    async def _engine_error(request: Request, exc: WrangleError):
        return ApiError.from_engine(exc).response()

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/datasets", status_code=201)
    async def upload_dataset(
        request: Request,
        name: str = Query(default="dataset.csv"),
        delimiter: str = Query(default=","),
        has_header: bool = Query(default=True),
        numeric_majority: float = Query(default=0.5, gt=0, le=1),
    ):
        body = await request.body()
        if len(body) > config.max_upload_bytes:
            raise ApiError(413, "UPLOAD_TOO_LARGE",
                           f"upload exceeds {config.max_upload_bytes} bytes")
        options = LoadOptions(delimiter=delimiter, has_header=has_header)
        table = infer_kinds(load_csv(body, options, name=name), numeric_majority=numeric_majority)
        dataset_id = uuid.uuid4().hex[:12]
        app.state.datasets[dataset_id] = (table, options)
        return {
            "dataset_id": dataset_id,
            "schema": [{"name": c.name, "kind": c.kind.value} for c in table.columns],
            "row_count": table.row_count,
        }

    def _dataset(dataset_id: str) -> tuple[Table, LoadOptions]:
        entry = app.state.datasets.get(dataset_id)
        if entry is None:
            raise ApiError(404, "DATASET_NOT_FOUND", f"no dataset {dataset_id!r}")
        return entry

    @app.post("/api/sessions", status_code=201)
    async def create_session_endpoint(request: Request):
        payload = await request.json()
        if "dataset_id" not in payload:
            raise ApiError(400, "BAD_REQUEST", "dataset_id is required")
        table, options = _dataset(payload["dataset_id"])
        detector_config = DetectorConfig.from_json(payload.get("config", {}))
        if payload.get("specs"):
            specs = [spec_from_json(s) for s in payload["specs"]]
        else:
            specs = enumerate_all_specs(
                table,
                targets=payload.get("targets"),
                min_support=int(payload.get("min_support", 1)),
            )
        session = Session(table, detector_config, specs, load_options=options)
        app.state.store.put(session)
        ranked = rank_groups(session.index, detector_config.top_k) if session.records else []
        return {
            "session_id": session.id,
            "version": session.table.version,
            "row_count": session.table.row_count,
            "ranked": _ranked_json(ranked),
            "total_records": len(session.records),
        }

    @app.get("/api/sessions/{session_id}/anomalies")
    def anomalies(session_id: str, top_k: Optional[int] = Query(default=None, ge=1)):
        box = app.state.store.get(session_id)
        session = box.session
        k = top_k if top_k is not None else session.config.top_k
        return {
            "version": session.table.version,
            "ranked": _ranked_json(rank_groups(session.index, k)),
            "records": [record_to_json(r) for r in session.records],
        }

    @app.get("/api/sessions/{session_id}/summary")
    def summary(session_id: str):
        session = app.state.store.get(session_id).session
        return {
            "version": session.table.version,
            "columns": [
                {
                    "column": s.column,
                    "per_type_counts": _counts_json(s.per_type_counts),
                    "per_type_frequency": _counts_json_float(s.per_type_frequency),
                    "score": s.score,
                }
                for s in attribute_summary(session.table, session.records)
            ],
        }

    def _counts_json_float(counts: dict) -> dict:
        return {t.to_string(): v for t, v in sorted(counts.items(), key=lambda kv: kv[0].sort_key())}

    @app.get("/api/sessions/{session_id}/chart")
    def chart(
        session_id: str,
        group_by: str,
        target: str,
        kind: str = Query(default="stacked_histogram"),
        mode: str = Query(default="group_name"),
        min_support: int = Query(default=1, ge=1),
    ):
        session = app.state.store.get(session_id).session
        spec = next(
            (s for s in session.specs if s.group_by == group_by and s.target == target),
            None,
        )
        if spec is None:
            raise ApiError(404, "SPEC_NOT_FOUND",
                           f"session has no spec {group_by!r} x {target!r}")
        return chart_payload(session.table, spec, kind, mode, session.records)

    @app.post("/api/sessions/{session_id}/suggestions")
    async def suggestions(session_id: str, request: Request):
        payload = await request.json()
        if "record" not in payload:
            raise ApiError(400, "BAD_REQUEST", "record is required")
        box = app.state.store.get(session_id)
        session = box.session
        record = record_from_json(payload["record"])
        actions = suggest_repairs(
            record, session.table, session.groups, similarity_fn=app.state.similarity
        )
        return {
            "version": session.table.version,
            "suggestions": [action_to_json(a) for a in actions],
        }

    @app.post("/api/sessions/{session_id}/preview")
    async def preview_action(session_id: str, request: Request):
        payload = await request.json()
        if "action" not in payload:
            raise ApiError(400, "BAD_REQUEST", "action is required")
        box = app.state.store.get(session_id)
        with box.lock:
            diff = box.session.preview(action_from_json(payload["action"]))
        return _preview_json(diff)

    @app.post("/api/sessions/{session_id}/actions")
    async def commit_action(session_id: str, request: Request):
        payload = await request.json()
        if "action" not in payload:
            raise ApiError(400, "BAD_REQUEST", "action is required")
        box = app.state.store.get(session_id)
        with box.lock:
            session = box.session
            before = counts_by_type(session.records)
            session.commit(action_from_json(payload["action"]))
            return {
                "version": session.table.version,
                "anomalies_before": _counts_json(before),
                "anomalies_after": _counts_json(counts_by_type(session.records)),
            }

    @app.post("/api/sessions/{session_id}/undo")
    def undo_action(session_id: str):
        box = app.state.store.get(session_id)
        with box.lock:
            session = box.session
            before = counts_by_type(session.records)
            session.undo()
            return {
                "version": session.table.version,
                "anomalies_before": _counts_json(before),
                "anomalies_after": _counts_json(counts_by_type(session.records)),
            }

    @app.post("/api/sessions/{session_id}/redo")
    def redo_action(session_id: str):
        box = app.state.store.get(session_id)
        with box.lock:
            session = box.session
            before = counts_by_type(session.records)
            session.redo()
            return {
                "version": session.table.version,
                "anomalies_before": _counts_json(before),
                "anomalies_after": _counts_json(counts_by_type(session.records)),
            }

    @app.get("/api/sessions/{session_id}/script")
    def script(session_id: str):
        session = app.state.store.get(session_id).session
        artifact = generate_script(session)
        return {
            "source_text": artifact.source_text,
            "language_tag": artifact.language_tag,
            "input_ref": artifact.input_ref,
            "action_count": artifact.action_count,
            "verifiable": artifact.verifiable,
            "warnings": artifact.warnings,
        }

    @app.get("/api/sessions/{session_id}/export")
    def export(session_id: str):
        return app.state.store.get(session_id).session.export()

    @app.get("/api/sessions/{session_id}/table")
    def table_csv(session_id: str, format: str = Query(default="csv")):
        if format != "csv":
            raise ApiError(400, "BAD_REQUEST", f"unsupported format {format!r}")
        session = app.state.store.get(session_id).session
        text = serialize_csv(session.table, session.load_options)
        return Response(content=text, media_type="text/csv; charset=utf-8")

    return app


def serve(config: Optional[ServerConfig] = None) -> None:
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    config = config or ServerConfig.from_env()
    app = create_app(config)
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="info")
