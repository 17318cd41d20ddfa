"""HTTP layer: ask, feedback, metrics, and health over the loaded banks.

The app is stateless between requests apart from the append-only logs, so
restarting and replaying a request yields the same answers when the
reference embedder is configured. Error bodies always carry
{error, detail, retryable} so clients can branch without parsing prose.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from asksci.embedder import EmbedderConfig, apply_env_overrides, make_embedder
from asksci.errors import (
    AskSciError,
    BadWindow,
    EmbedFailure,
    EmptyQuestion,
    IoFailure,
    PositionOutOfRange,
    UnknownQuestion,
)
from asksci.domain import VoteRecord
from asksci.feedback import FeedbackStore, compute_report
from asksci.index import load_index
from asksci.query import QueryConfig, QueryEngine, utcnow_iso
from asksci.storage import (
    JsonlAppender,
    load_chunk_payloads,
    load_exam_payloads,
    read_jsonl,
)

API_VERSION = "1"
ALL_TIME_WINDOW = ("0001-01-01T00:00:00Z", "9999-12-31T23:59:59Z")
DEFAULT_RATE_LIMIT_PER_MINUTE = 60


@dataclass(frozen=True)
class ServiceConfig:
    subject: str
    listen: str
    answers_index: Path
    answers_payloads: Path
    exams_index: Path
    exams_payloads: Path
    questions_log: Path
    votes_log: Path
    assets_dir: Path
    embedder: EmbedderConfig
    query: QueryConfig = QueryConfig()
    ui_dir: Optional[Path] = None
    cors_origins: tuple[str, ...] = ()
    rate_limit_per_minute: int = DEFAULT_RATE_LIMIT_PER_MINUTE


def load_service_config(path) -> ServiceConfig:
    """Read a JSON config file. Relative paths resolve against the file's
    directory. Index, payload, and asset paths must exist; logs are created
    on first write."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IoFailure(f"config {path} is not valid JSON: {exc}") from exc

    base = path.resolve().parent

    def resolve(key: str, required: bool = True) -> Optional[Path]:
        value = raw.get(key)
        if value is None:
            if required:
                raise IoFailure(f"config {path}: missing key {key!r}")
            return None
        return (base / value).resolve()

    embedder = EmbedderConfig(**raw.get("embedder", {}))
    embedder = apply_env_overrides(embedder)
    query = QueryConfig(**raw.get("query", {}))

    return ServiceConfig(
        subject=raw["subject"],
        listen=raw.get("listen", "127.0.0.1:8080"),
        answers_index=resolve("answers_index"),
        answers_payloads=resolve("answers_payloads"),
        exams_index=resolve("exams_index"),
        exams_payloads=resolve("exams_payloads"),
        questions_log=resolve("questions_log"),
        votes_log=resolve("votes_log"),
        assets_dir=resolve("assets_dir"),
        embedder=embedder,
        query=query,
        ui_dir=resolve("ui_dir", required=False),
        cors_origins=tuple(raw.get("cors_origins", [])),
        rate_limit_per_minute=raw.get(
            "rate_limit_per_minute", DEFAULT_RATE_LIMIT_PER_MINUTE
        ),
    )


class RateLimiter:
    """Fixed-window per-client request cap. A cap of 0 disables it."""

    def __init__(self, per_minute: int):
        self.per_minute = per_minute
        self._lock = threading.Lock()
        self._window_start = 0
        self._counts: dict[str, int] = {}

    def allow(self, client_key: str) -> bool:
        if self.per_minute <= 0:
            return True
        now_window = int(time.time() // 60)
        with self._lock:
            if now_window != self._window_start:
                self._window_start = now_window
                self._counts = {}
            count = self._counts.get(client_key, 0) + 1
            self._counts[client_key] = count
            return count <= self.per_minute


class AskBody(BaseModel):
    question: str
    client_id: str = "anonymous"
    subject: Optional[str] = None
    country: Optional[str] = None


class FeedbackBody(BaseModel):
    question_id: str
    position: int
    helpful: bool
    client_id: str


def _error_body(error: str, detail: str, retryable: bool = False) -> dict:
    return {"error": error, "detail": detail, "retryable": retryable}


def _fail_fast(config: ServiceConfig) -> None:
    required = [
        config.answers_index,
        config.answers_payloads,
        config.exams_index,
        config.exams_payloads,
        config.assets_dir,
    ]
    if config.ui_dir is not None:
        required.append(config.ui_dir)
    missing = [str(p) for p in required if not p.exists()]
    if missing:
        raise IoFailure("missing at startup: " + ", ".join(missing))


def create_app(config: ServiceConfig) -> FastAPI:
    _fail_fast(config)

    answer_index = load_index(config.answers_index)
    exam_index = load_index(config.exams_index)
    chunk_payloads = load_chunk_payloads(config.answers_payloads)
    exam_payloads = load_exam_payloads(config.exams_payloads)
    embedder = make_embedder(config.embedder)

    engine = QueryEngine(
        answer_index=answer_index,
        chunk_payloads=chunk_payloads,
        exam_index=exam_index,
        exam_payloads=exam_payloads,
        embedder=embedder,
        question_log=JsonlAppender(config.questions_log),
        subject=config.subject,
    )
    store = FeedbackStore.from_question_log(
        JsonlAppender(config.votes_log), config.questions_log
    )
    limiter = RateLimiter(config.rate_limit_per_minute)

    app = FastAPI(openapi_url=None, docs_url=None, redoc_url=None)

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["Content-Type"],
        )

    @app.middleware("http")
    async def stamp_api_version(request: Request, call_next):
        response = await call_next(request)
        if request.url.path.startswith("/api/"):
            response.headers["X-Api-Version"] = API_VERSION
        return response

    @app.exception_handler(RequestValidationError)
    async def invalid_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=_error_body("bad_request", str(exc.errors()[:3])),
        )

    @app.exception_handler(AskSciError)
    async def domain_error(request: Request, exc: AskSciError):
        return JSONResponse(
            status_code=500, content=_error_body("internal", str(exc))
        )

    def rate_limited(client_key: str) -> Optional[JSONResponse]:
        if limiter.allow(client_key):
            return None
        return JSONResponse(
            status_code=429,
            content=_error_body("rate_limited", "per-client request cap hit", True),
        )

    @app.post("/api/ask")
    def ask(body: AskBody):
        refusal = rate_limited(body.client_id)
        if refusal is not None:
            return refusal
        if body.subject is not None and body.subject != config.subject:
            return JSONResponse(
                status_code=400,
                content=_error_body(
                    "unknown_subject",
                    f"only {config.subject!r} is loaded",
                ),
            )
        try:
            result = engine.answer_question(
                body.question,
                config=config.query,
                client_id=body.client_id,
                country=body.country,
            )
        except EmptyQuestion as exc:
            return JSONResponse(
                status_code=400, content=_error_body("empty_question", str(exc))
            )
        except EmbedFailure as exc:
            return JSONResponse(
                status_code=503,
                content=_error_body("embed_failure", str(exc), retryable=True),
            )
        store.register_question(result.question_id, len(result.answers))
        return JSONResponse(status_code=200, content=result.to_dict())

    @app.post("/api/feedback")
    def feedback(body: FeedbackBody):
        refusal = rate_limited(body.client_id)
        if refusal is not None:
            return refusal
        try:
            vote = VoteRecord(
                question_id=body.question_id,
                position=body.position,
                helpful=body.helpful,
                timestamp=utcnow_iso(),
                client_id=body.client_id,
            )
        except ValueError as exc:
            return JSONResponse(
                status_code=400, content=_error_body("position_out_of_range", str(exc))
            )
        try:
            store.record_vote(vote)
        except UnknownQuestion as exc:
            return JSONResponse(
                status_code=404, content=_error_body("unknown_question", str(exc))
            )
        except PositionOutOfRange as exc:
            return JSONResponse(
                status_code=400, content=_error_body("position_out_of_range", str(exc))
            )
        return Response(status_code=204)

    @app.get("/api/metrics")
    def metrics(start: Optional[str] = None, end: Optional[str] = None):
        window = (start or ALL_TIME_WINDOW[0], end or ALL_TIME_WINDOW[1])
        questions = read_jsonl(config.questions_log)
        votes = read_jsonl(config.votes_log)
        try:
            report = compute_report(questions, votes, window)
        except (BadWindow, ValueError) as exc:
            return JSONResponse(
                status_code=400, content=_error_body("bad_window", str(exc))
            )
        return report.to_dict()

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "answer_entries": len(answer_index.ids),
            "exam_entries": len(exam_index.ids),
            "model_id": answer_index.model_id,
        }

    app.mount("/assets", StaticFiles(directory=config.assets_dir), name="assets")
    if config.ui_dir is not None:
        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app
