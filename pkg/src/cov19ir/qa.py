"""Question answering pipeline: stream every chunk through span extraction
and return the globally best-scoring span.

Ranking uses the span extractor's score alone; ties resolve to the lowest
doc_id, then the lowest chunk index. An unanswerable corpus (all scores
zero) yields the empty answer at the first chunk's coordinates.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .corpus import Chunk, CorpusIndex
from .errors import EmptyCorpus, ScorerError
from .retrieval import OnError
from .scoring import ScoredSpan, SpanExtractor

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QAResult:
    answer: ScoredSpan
    doc_id: str
    chunk_index: int


def answer(
    query: str,
    corpus: CorpusIndex,
    span_extractor: SpanExtractor,
    workers: int = 1,
    on_error: OnError | None = None,
) -> QAResult:
    """Global argmax of the span score across all chunks of the corpus."""
    if len(corpus) == 0:
        raise EmptyCorpus("answer called on an empty corpus")
    chunks = list(corpus.chunks())
    if not chunks:
        raise EmptyCorpus("corpus documents produced no chunks")

    def safe(chunk: Chunk) -> ScoredSpan:
        try:
            return span_extractor.extract(query, chunk.text)
        except ScorerError as exc:
            log.warning("chunk (%s, %d) scored 0: %s", chunk.doc_id, chunk.chunk_index, exc)
            if on_error is not None:
                on_error(chunk, exc)
            return ScoredSpan.empty()

    if workers <= 1:
        spans = [safe(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            spans = list(pool.map(safe, chunks))

    best_chunk = chunks[0]
    best_span = spans[0]
    for chunk, span in zip(chunks[1:], spans[1:]):
        if span.score > best_span.score or (
            span.score == best_span.score
            and (chunk.doc_id, chunk.chunk_index) < (best_chunk.doc_id, best_chunk.chunk_index)
        ):
            best_chunk, best_span = chunk, span
    if best_span.score == 0.0:
        first = chunks[0]
        return QAResult(ScoredSpan.empty(), first.doc_id, first.chunk_index)
    return QAResult(best_span, best_chunk.doc_id, best_chunk.chunk_index)
