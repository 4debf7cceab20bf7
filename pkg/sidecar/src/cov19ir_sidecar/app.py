"""Wire protocol endpoints: /v1/span, /v1/paraphrase, /v1/health.

Contract: 400 for missing fields, 415 for non-JSON bodies, 422 for an
empty context, 503 until both models are loaded (or after a load
failure). Span responses always satisfy context[start:end] == text, and
every score lies in [0, 1]. Truncated contexts are flagged with the
X-Context-Truncated response header.
"""

from __future__ import annotations

import logging
import threading

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backends import load_paraphrase_model, load_span_model

log = logging.getLogger(__name__)

TRUNCATION_HEADER = "X-Context-Truncated"


class SpanRequest(BaseModel):
    query: str
    context: str


class SpanResponse(BaseModel):
    text: str
    start: int
    end: int
    score: float


class ParaphraseRequest(BaseModel):
    text_a: str
    text_b: str


class ParaphraseResponse(BaseModel):
    score: float


class HealthResponse(BaseModel):
    status: str
    span_model: str
    paraphrase_model: str


class ModelState:
    """Both models plus load status; inference is serialized by a lock."""

    def __init__(self, span_spec: str, paraphrase_spec: str) -> None:
        self.span_spec = span_spec
        self.paraphrase_spec = paraphrase_spec
        self.span_model = None
        self.paraphrase_model = None
        self.failure: str | None = None
        self._lock = threading.Lock()

    def load(self) -> None:
        try:
            self.span_model = load_span_model(self.span_spec)
            self.paraphrase_model = load_paraphrase_model(self.paraphrase_spec)
        except Exception as exc:  # surfaced via /v1/health, not raised
            self.failure = f"{type(exc).__name__}: {exc}"
            self.span_model = None
            self.paraphrase_model = None
            log.error("model load failed: %s", self.failure)

    @property
    def ready(self) -> bool:
        return self.span_model is not None and self.paraphrase_model is not None

    def predict_span(self, query: str, context: str):
        with self._lock:
            return self.span_model.predict(query, context)

    def predict_paraphrase(self, text_a: str, text_b: str) -> float:
        with self._lock:
            return self.paraphrase_model.predict(text_a, text_b)


def create_app(
    span_model: str = "lexical",
    paraphrase_model: str = "lexical",
    load: bool = True,
) -> FastAPI:
    app = FastAPI(title="cov19ir-sidecar")
    state = ModelState(span_model, paraphrase_model)
    app.state.models = state
    if load:
        state.load()

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.middleware("http")
    async def require_json(request: Request, call_next):
        if request.method == "POST":
            content_type = request.headers.get("content-type", "")
            if "application/json" not in content_type.lower():
                return JSONResponse(
                    status_code=415, content={"detail": "content-type must be application/json"}
                )
        return await call_next(request)

    def ensure_ready() -> None:
        if not state.ready:
            reason = state.failure or "models loading"
            raise HTTPException(status_code=503, detail=reason)

    @app.get("/v1/health", response_model=HealthResponse)
    def health():
        if not state.ready:
            reason = state.failure or "models loading"
            return JSONResponse(status_code=503, content={"detail": reason})
        return HealthResponse(
            status="ok",
            span_model=state.span_model.name,
            paraphrase_model=state.paraphrase_model.name,
        )

    @app.post("/v1/span", response_model=SpanResponse)
    def span(request: SpanRequest, response: Response):
        ensure_ready()
        if not request.context:
            raise HTTPException(status_code=422, detail="context must be nonempty")
        prediction = state.predict_span(request.query, request.context)
        if prediction.truncated:
            response.headers[TRUNCATION_HEADER] = "1"
        return SpanResponse(
            text=prediction.text,
            start=prediction.start,
            end=prediction.end,
            score=prediction.score,
        )

    @app.post("/v1/paraphrase", response_model=ParaphraseResponse)
    def paraphrase(request: ParaphraseRequest):
        ensure_ready()
        return ParaphraseResponse(score=state.predict_paraphrase(request.text_a, request.text_b))

    return app
