"""HTTP service: the retrieval/QA pipeline behind a FastAPI app.

The index is loaded once and shared read-only across requests; /retrieve
and /answer run the same pipeline functions the CLI uses. Requests with
missing fields return 400; requests before the index is ready return 503.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .config import Config
from .corpus import CorpusIndex, load_corpus
from .errors import ConfigError
from .lexicon import EmbeddingProvider, KeywordLexicon, WordVectorEmbedding, load_lexicon
from .qa import answer as qa_answer
from .retrieval import retrieve
from .scoring import (
    LexicalParaphraseScorer,
    LexicalSpanExtractor,
    ParaphraseScorer,
    RemoteParaphraseScorer,
    RemoteSpanExtractor,
    SpanExtractor,
)

log = logging.getLogger(__name__)


class RetrieveRequest(BaseModel):
    query: str
    k: int | None = Field(default=None, ge=1)


class RetrieveHit(BaseModel):
    rank: int
    doc_id: str
    score: float
    excerpt: str


class RetrieveResponse(BaseModel):
    results: list[RetrieveHit]


class AnswerRequest(BaseModel):
    query: str


class AnswerResponse(BaseModel):
    doc_id: str
    chunk_index: int
    answer: str
    score: float


class HealthResponse(BaseModel):
    status: str


def build_scorers(config: Config) -> tuple[SpanExtractor, ParaphraseScorer]:
    if config.scorer == "remote":
        if not config.endpoint:
            raise ConfigError("remote scorer requires an endpoint")
        extractor = RemoteSpanExtractor(
            config.endpoint, config.timeout, config.retries, config.workers
        )
        scorer = RemoteParaphraseScorer(
            config.endpoint, config.timeout, config.retries, config.workers
        )
        return extractor, scorer
    return LexicalSpanExtractor(), LexicalParaphraseScorer()


class PipelineState:
    """Everything a request needs: index, scorers, optional rewriting."""

    def __init__(self, config: Config) -> None:
        self.config = config
        self.index: CorpusIndex | None = None
        self.span_extractor: SpanExtractor | None = None
        self.paraphrase_scorer: ParaphraseScorer | None = None
        self.lexicon: KeywordLexicon | None = None
        self.embedding: EmbeddingProvider | None = None

    def load(self) -> None:
        if not self.config.index:
            raise ConfigError("service requires an index path")
        self.index = load_corpus(self.config.index, self.config.chunk_policy())
        self.span_extractor, self.paraphrase_scorer = build_scorers(self.config)
        if self.config.lexicon:
            self.lexicon = load_lexicon(self.config.lexicon)
        if self.config.embeddings:
            self.embedding = WordVectorEmbedding.from_file(self.config.embeddings)
        log.info(
            "loaded index with %d documents, %d chunks",
            len(self.index),
            self.index.chunk_count,
        )

    @property
    def ready(self) -> bool:
        return self.index is not None


def run_retrieve(
    state: PipelineState, query: str, k: int | None = None, on_error=None
) -> list[RetrieveHit]:
    assert state.index is not None
    config = state.config
    embedding = state.embedding if state.lexicon is not None else None
    ranked = retrieve(
        query,
        state.index,
        state.span_extractor,
        state.paraphrase_scorer,
        k=k or config.top_k,
        pn_weight=config.pn_weight,
        lexicon=state.lexicon,
        embedding=embedding,
        cutoff=config.cutoff,
        workers=config.workers,
        on_error=on_error,
    )
    return [
        RetrieveHit(rank=i + 1, doc_id=d.doc_id, score=d.doc_score, excerpt=d.best_span.text)
        for i, d in enumerate(ranked)
    ]


def run_answer(state: PipelineState, query: str, on_error=None) -> AnswerResponse:
    assert state.index is not None
    result = qa_answer(
        query, state.index, state.span_extractor, workers=state.config.workers, on_error=on_error
    )
    return AnswerResponse(
        doc_id=result.doc_id,
        chunk_index=result.chunk_index,
        answer=result.answer.text,
        score=result.answer.score,
    )


def create_app(config: Config, load: bool = True) -> FastAPI:
    """Build the service app; with load=False the index loads lazily (503 until then)."""
    app = FastAPI(title="cov19ir", version=__version__)
    state = PipelineState(config.validate())
    app.state.pipeline = state
    if load:
        state.load()

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def not_ready() -> JSONResponse:
        return JSONResponse(status_code=503, content={"detail": "index loading"})

    @app.get("/healthz", response_model=HealthResponse)
    def healthz():
        if not state.ready:
            return not_ready()
        return HealthResponse(status="ok")

    @app.post("/retrieve", response_model=RetrieveResponse)
    def retrieve_endpoint(request: RetrieveRequest):
        if not state.ready:
            return not_ready()
        return RetrieveResponse(results=run_retrieve(state, request.query, request.k))

    @app.post("/answer", response_model=AnswerResponse)
    def answer_endpoint(request: AnswerRequest):
        if not state.ready:
            return not_ready()
        return run_answer(state, request.query)

    return app
