"""HTTP service wrapping the pipeline: search, stats, health, reindex.

Endpoints:
    POST /api/search          run a query (JSON in, JSON out)
    GET  /api/corpus/stats    corpus counts
    GET  /api/health          liveness plus per-backend reachability
    POST /api/admin/reindex   rebuild the dense index offline, swap atomically

Requests are stateless against an immutable engine snapshot; reindexing
builds a new snapshot and swaps it in one assignment, so concurrent searches
never observe a half-built index. Errors use machine-readable codes in
``{"error": {"code", "message"}}``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from datetime import date

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .corpus import Corpus, DateRange
from .dense import DenseIndex, build_dense_index
from .errors import TransportError, UnknownLanguageError
from .lexical import InvertedIndex
from .pipeline import PipelineComponents, QueryOptions, RankedResult, answer_query

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MAX_K = 50
EMBED_BATCH = 128
HEALTH_PROBE_TIMEOUT = 1.0


class ApiError(Exception):
    """Request-level failure with a machine-readable code."""

    def __init__(self, code: str, message: str, status: int = 400):
        self.code = code
        self.message = message
        self.status = status
        super().__init__(message)


@dataclass(frozen=True)
class EngineSnapshot:
    """Immutable bundle served by the API; replaced whole on reindex.

    ``dense_index`` may be None while the first build is still pending;
    health reports that state and searches fail with a structured error
    until a reindex installs one.
    """

    corpus: Corpus
    dense_index: DenseIndex | None
    embedder: object
    extractor: object
    translator: object | None = None
    bm25_index: InvertedIndex | None = None

    def components(self) -> PipelineComponents:
        return PipelineComponents(
            corpus=self.corpus,
            index=self.dense_index,
            embedder=self.embedder,
            extractor=self.extractor,
            translator=self.translator,
        )


def embed_corpus(corpus: Corpus, embedder, batch: int = EMBED_BATCH):
    """Yield (doc_id, passage vector) for every document, in corpus order."""
    docs = list(corpus)
    for i in range(0, len(docs), batch):
        chunk = docs[i:i + batch]
        vectors = embedder.embed_batch([d.body for d in chunk], role="passage")
        for doc, vec in zip(chunk, vectors):
            yield doc.id, vec


def _parse_date(value: str, key: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise ApiError("bad_date", f"{key} must be YYYY-MM-DD, got {value!r}")


def _result_to_dict(result: RankedResult) -> dict:
    doc = result.document
    return {
        "doc_id": doc.id,
        "title": doc.title,
        "date": doc.date.isoformat() if doc.date else None,
        "lang": doc.lang,
        "body": doc.body,
        "retrieval_score": result.retrieval_score,
        "spans": [
            {"start": s.start_char, "end": s.end_char, "text": s.text, "confidence": s.confidence}
            for s in result.answers
        ],
        "highlight_colors": list(result.highlight_colors),
        "answer_translations": result.answer_translations,
        "body_translation": result.body_translation,
        "diagnostics": list(result.diagnostics),
    }


class SearchService:
    """Holds the current engine snapshot and implements the endpoints."""

    def __init__(self, snapshot: EngineSnapshot):
        self._snapshot = snapshot

    @property
    def snapshot(self) -> EngineSnapshot:
        return self._snapshot

    def handle_search(self, payload: dict) -> dict:
        snap = self._snapshot
        if snap.dense_index is None:
            raise ApiError("no_index", "no dense index loaded; run a reindex first", status=503)
        if not isinstance(payload, dict):
            raise ApiError("bad_request", "request body must be a JSON object")
        query = payload.get("query", "")
        if not isinstance(query, str) or not query.strip():
            raise ApiError("empty_query", "query must be a nonempty string")
        k = payload.get("k", 3)
        if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= MAX_K:
            raise ApiError("bad_k", f"k must be an integer in [1, {MAX_K}]")
        langs = payload.get("langs")
        if langs is not None:
            if not isinstance(langs, list) or not all(isinstance(c, str) for c in langs):
                raise ApiError("bad_lang", "langs must be a list of language codes")
        date_from = payload.get("date_from")
        date_to = payload.get("date_to")
        date_range = None
        if date_from is not None or date_to is not None:
            start = _parse_date(date_from, "date_from") if date_from is not None else None
            end = _parse_date(date_to, "date_to") if date_to is not None else None
            try:
                date_range = DateRange(start, end)
            except ValueError as exc:
                raise ApiError("bad_date", str(exc))

        opts = QueryOptions(k=k, langs=frozenset(langs) if langs else None, date_range=date_range)
        started = time.perf_counter()
        try:
            results = answer_query(query, opts, snap.components())
        except UnknownLanguageError as exc:
            raise ApiError("bad_lang", str(exc))
        except TransportError as exc:
            raise ApiError("upstream_unavailable", str(exc), status=503)
        timing_ms = (time.perf_counter() - started) * 1000.0
        degraded = any(r.diagnostics for r in results)
        return {
            "schema_version": SCHEMA_VERSION,
            "results": [_result_to_dict(r) for r in results],
            "fallback_used": any(r.fallback_used for r in results),
            "degraded": degraded,
            "timing_ms": timing_ms,
        }

    def handle_stats(self) -> dict:
        stats = self._snapshot.corpus.stats().to_dict()
        stats["schema_version"] = SCHEMA_VERSION
        return stats

    def handle_health(self) -> dict:
        snap = self._snapshot
        endpoints = {}
        for name, backend in (
            ("embed", snap.embedder),
            ("extract", snap.extractor),
            ("translate", snap.translator),
        ):
            if backend is None:
                endpoints[name] = False
            elif hasattr(backend, "probe"):
                endpoints[name] = bool(backend.probe(timeout=HEALTH_PROBE_TIMEOUT))
            else:
                endpoints[name] = True  # in-process stub
        status = "ok" if all(endpoints.values()) else "degraded"
        return {
            "schema_version": SCHEMA_VERSION,
            "status": status,
            "index_loaded": snap.dense_index is not None and len(snap.dense_index) > 0,
            "endpoints": endpoints,
        }

    def reindex(self) -> dict:
        """Re-embed the corpus and swap the snapshot; searches keep serving
        the old one until the single assignment below."""
        snap = self._snapshot
        started = time.perf_counter()
        new_index = build_dense_index(embed_corpus(snap.corpus, snap.embedder))
        self._snapshot = EngineSnapshot(
            corpus=snap.corpus,
            dense_index=new_index,
            embedder=snap.embedder,
            extractor=snap.extractor,
            translator=snap.translator,
            bm25_index=snap.bm25_index,
        )
        return {
            "schema_version": SCHEMA_VERSION,
            "status": "ok",
            "docs": len(new_index),
            "timing_ms": (time.perf_counter() - started) * 1000.0,
        }


def create_app(service: SearchService, static_dir: str | None = None) -> FastAPI:
    from starlette.concurrency import run_in_threadpool

    app = FastAPI(title="crossqa", docs_url=None, redoc_url=None)
    app.state.service = service

    @app.exception_handler(ApiError)
    async def api_error_handler(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.post("/api/search")
    async def search(request: Request):
        try:
            payload = await request.json()
        except Exception:
            raise ApiError("bad_request", "request body must be valid JSON")
        return await run_in_threadpool(service.handle_search, payload)

    @app.get("/api/corpus/stats")
    async def stats():
        return service.handle_stats()

    @app.get("/api/health")
    async def health():
        return await run_in_threadpool(service.handle_health)

    @app.post("/api/admin/reindex")
    async def reindex():
        try:
            return await run_in_threadpool(service.reindex)
        except TransportError as exc:
            raise ApiError("upstream_unavailable", str(exc), status=503)

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
