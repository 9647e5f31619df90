"""HTTP service exposing the five demo functions plus task listing.

Thin wrappers: every endpoint serializes the corresponding library
operation's result. Models load lazily on first request per task and live
in a bounded least-recently-used pool.
"""
from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import classification, masked_lm, ner
from .embeddings.tweets import tweet_similarity
from .errors import (EmptyInput, KTooLarge, ModelFetchError, NoMaskPresent,
                     RateLimited, TweetKitError, UnknownTarget, UnknownTask,
                     UnsupportedLanguage, UpstreamError)
from .ingest import SearchQuery, TweetSearchClient, aggregate_over_time
from .registry import Registry, StanceHandle, default_registry

SCHEMA_VERSION = "1"


@dataclass
class ServiceConfig:
    pool_size: int = 4
    max_body_bytes: int = 16 * 1024
    cors_origins: tuple[str, ...] = ("*",)
    hashtag_default_bucket_seconds: int = 86400
    default_top_k: int = 5


class ModelPool:
    """Bounded LRU pool of loaded handles keyed by (task, language, target)."""

    def __init__(self, registry: Registry, size: int):
        self._registry = registry
        self._size = size
        self._lock = threading.Lock()
        self._pool: OrderedDict = OrderedDict()

    def get(self, task: str, language=None, target=None):
        key = (task, language, target)
        with self._lock:
            if key in self._pool:
                self._pool.move_to_end(key)
                return self._pool[key]
        handle = self._registry.load(task, language=language, target=target)
        with self._lock:
            self._pool[key] = handle
            self._pool.move_to_end(key)
            while len(self._pool) > self._size:
                self._pool.popitem(last=False)
        return handle

    def loaded(self):
        with self._lock:
            return [k[0] for k in self._pool]


# -- request bodies

class ClassifyRequest(BaseModel):
    text: str = Field(min_length=1)
    language: str | None = None
    target: str | None = None
    top_k: int | None = None


class NerRequest(BaseModel):
    text: str = Field(min_length=1)


class MaskRequest(BaseModel):
    text: str = Field(min_length=1)
    k: int = Field(default=5, ge=1)


class SimilarityRequest(BaseModel):
    text_a: str = Field(min_length=1)
    text_b: str = Field(min_length=1)


class HashtagRequest(BaseModel):
    query: str = Field(min_length=1)
    start: datetime
    end: datetime
    task: str = "sentiment"
    language: str | None = None
    bucket_width_seconds: int | None = Field(default=None, ge=1)
    max_results: int = Field(default=500, ge=1)


_STATUS = {
    UnknownTask: 404,
    UnknownTarget: 404,
    UnsupportedLanguage: 400,
    NoMaskPresent: 400,
    KTooLarge: 400,
    EmptyInput: 400,
    ModelFetchError: 503,
    RateLimited: 429,
    UpstreamError: 502,
}


def _error_response(code: str, message: str, status: int, headers=None):
    return JSONResponse({"error": {"code": code, "message": message},
                         "schema_version": SCHEMA_VERSION},
                        status_code=status, headers=headers)


def create_app(registry: Registry | None = None,
               search_client: TweetSearchClient | None = None,
               config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    registry = registry or default_registry()
    pool = ModelPool(registry, config.pool_size)
    app = FastAPI(title="tweetkit service")
    app.add_middleware(CORSMiddleware, allow_origins=list(config.cors_origins),
                       allow_methods=["*"], allow_headers=["*"])

    @app.middleware("http")
    async def limit_body(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and int(length) > config.max_body_bytes:
            return _error_response("body_too_large",
                                   f"request body exceeds {config.max_body_bytes} bytes", 413)
        return await call_next(request)

    @app.exception_handler(TweetKitError)
    async def handle_toolkit_error(request: Request, exc: TweetKitError):
        status = 500
        for etype, code in _STATUS.items():
            if isinstance(exc, etype):
                status = code
                break
        headers = None
        if isinstance(exc, RateLimited) and exc.retry_after is not None:
            headers = {"Retry-After": str(exc.retry_after)}
        return _error_response(exc.code, str(exc), status, headers)

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return _error_response("invalid_body", str(exc.errors()[:3]), 422)

    def envelope(payload: dict, revision: str) -> dict:
        return {"schema_version": SCHEMA_VERSION, "model_revision": revision, **payload}

    @app.get("/tasks")
    def list_tasks():
        tasks = [{
            "name": spec.name,
            "problem_type": spec.problem_type,
            "labels": list(spec.labels),
            "metric": spec.metric,
            "needs_target": spec.needs_target,
        } for spec in registry.list_tasks()]
        return {"schema_version": SCHEMA_VERSION, "tasks": tasks}

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "loaded_models": pool.loaded(),
                "schema_version": SCHEMA_VERSION}

    @app.post("/classify/{task}")
    def classify(task: str, body: ClassifyRequest):
        spec = registry.task(task)
        if spec.needs_target and not body.target:
            return _error_response("missing_target",
                                   f"task {task!r} requires a 'target' field", 422)
        handle = pool.get(task, language=body.language, target=body.target)
        if isinstance(handle, StanceHandle):
            pred = classification.predict_stance(handle, body.text, body.target)
            revision = handle.cards[body.target].revision
        elif spec.problem_type == "multi_label":
            pred = classification.predict_multilabel(handle, body.text)
            revision = handle.card.revision
        else:
            pred = classification.predict(handle, body.text)
            revision = handle.card.revision
        payload = {"distribution": pred.distribution}
        if pred.label is not None:
            payload["label"] = pred.label
            if body.top_k and not isinstance(handle, StanceHandle):
                payload["top_k"] = [
                    {"label": l, "probability": p}
                    for l, p in classification.predict_topk(handle, body.text, body.top_k)
                ]
        else:
            payload["labels"] = sorted(pred.labels)
        return envelope(payload, revision)

    @app.post("/ner")
    def extract(body: NerRequest):
        handle = pool.get("ner")
        spans = ner.extract_entities(handle, body.text)
        return envelope({"entities": [
            {"surface": s.surface, "type": s.type, "start": s.start,
             "end": s.end, "confidence": s.confidence} for s in spans
        ]}, handle.card.revision)

    @app.post("/mask")
    def mask(body: MaskRequest):
        handle = pool.get("language_model")
        preds = masked_lm.predict_mask(handle, body.text, body.k)
        return envelope({"masks": [
            {"mask_index": p.mask_index,
             "candidates": [{"token": t, "probability": pr} for t, pr in p.candidates]}
            for p in preds
        ]}, handle.card.revision)

    @app.post("/similarity")
    def similarity(body: SimilarityRequest):
        handle = pool.get("sentence_embedding")
        score = tweet_similarity(handle.backend, body.text_a, body.text_b)
        return envelope({"score": score}, handle.card.revision)

    @app.post("/hashtag-analysis")
    def hashtag(body: HashtagRequest):
        if search_client is None:
            return _error_response("ingest_unconfigured",
                                   "no upstream credentials configured", 503)
        if body.start >= body.end:
            return _error_response("invalid_window", "start must be before end", 400)
        # resolves the language routing up front so unsupported codes 400
        registry.resolve_model(body.task, body.language)
        handle = pool.get(body.task, language=body.language)
        query = SearchQuery(query=body.query, start=body.start, end=body.end,
                            language=body.language, max_results=body.max_results)
        result = search_client.fetch_tweets(query)
        width = timedelta(seconds=body.bucket_width_seconds
                          or config.hashtag_default_bucket_seconds)
        if result.tweets:
            preds = classification.predict_batch(handle, [t.text for t in result.tweets])
            agg = aggregate_over_time(result.tweets, preds, width)
        else:
            agg = aggregate_over_time([], [], width)
        return envelope({
            "buckets": agg.to_dict()["buckets"],
            "bucket_width_seconds": width.total_seconds(),
            "tweets_analyzed": len(result.tweets),
            "capped": result.capped,
        }, handle.card.revision)

    return app
