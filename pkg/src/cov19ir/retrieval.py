"""Literature retrieval pipeline: per-chunk two-stage scoring, max
aggregation into document scores, proper-noun blending, top-k ranking.

The chunk's ranking score is the stage-2 paraphrase score (optionally
blended with the proper-noun exact-match fraction); the stage-1 span
score is kept on ChunkScore for diagnostics only.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .corpus import Chunk, CorpusIndex
from .errors import EmptyCorpus, ScorerError
from .lexicon import (
    EmbeddingProvider,
    KeywordLexicon,
    extract_proper_nouns,
    rewrite_unseen_query,
)
from .scoring import ParaphraseScorer, ScoredSpan, SpanExtractor
from .tokens import stripped_tokens

log = logging.getLogger(__name__)

OnError = Callable[[Chunk, Exception], None]


@dataclass(frozen=True)
class ChunkScore:
    doc_id: str
    chunk_index: int
    span: ScoredSpan
    paraphrase_score: float
    final_score: float


@dataclass(frozen=True)
class RankedDocument:
    doc_id: str
    doc_score: float
    best_chunk_index: int
    best_span: ScoredSpan


def combine_scores(base: float, query: str, chunk_text: str, pn_weight: float = 0.3) -> float:
    """Blend the base score with the proper-noun exact-match fraction.

    Queries without proper nouns pass the base through unchanged; otherwise
    the result is (1 - w) * base + w * matched / |proper nouns|, where a
    proper noun matches when it occurs case-sensitively as a word of the
    chunk text.
    """
    if not 0.0 <= base <= 1.0:
        raise ValueError(f"base score {base} outside [0, 1]")
    if not 0.0 <= pn_weight <= 1.0:
        raise ValueError(f"pn_weight {pn_weight} outside [0, 1]")
    proper_nouns = extract_proper_nouns(query)
    if not proper_nouns:
        return base
    chunk_words = set(stripped_tokens(chunk_text))
    matched = sum(1 for term in proper_nouns if term in chunk_words)
    return (1.0 - pn_weight) * base + pn_weight * (matched / len(proper_nouns))


def score_chunk(
    query: str,
    chunk: Chunk,
    span_extractor: SpanExtractor,
    paraphrase_scorer: ParaphraseScorer,
    pn_weight: float = 0.3,
) -> ChunkScore:
    """Stage-1 span extraction, stage-2 paraphrase scoring, score blend."""
    span = span_extractor.extract(query, chunk.text)
    if span.is_empty():
        paraphrase = 0.0
    else:
        paraphrase = paraphrase_scorer.score(query, span.text)
    final = combine_scores(paraphrase, query, chunk.text, pn_weight)
    return ChunkScore(chunk.doc_id, chunk.chunk_index, span, paraphrase, final)


def _zero_score(chunk: Chunk) -> ChunkScore:
    return ChunkScore(chunk.doc_id, chunk.chunk_index, ScoredSpan.empty(), 0.0, 0.0)


def _best_of(doc_id: str, scores: Sequence[ChunkScore]) -> RankedDocument:
    best = scores[0]
    for candidate in scores[1:]:
        if candidate.final_score > best.final_score:
            best = candidate
    if best.final_score == 0.0:
        first_index = min(s.chunk_index for s in scores)
        return RankedDocument(doc_id, 0.0, first_index, ScoredSpan.empty())
    return RankedDocument(doc_id, best.final_score, best.chunk_index, best.span)


def score_document(
    query: str,
    chunks: Sequence[Chunk],
    span_extractor: SpanExtractor,
    paraphrase_scorer: ParaphraseScorer,
    pn_weight: float = 0.3,
) -> RankedDocument:
    """Document-probability-score: the maximum of the chunk final scores.

    Ties go to the lowest chunk index; all-zero documents report the first
    chunk index with an empty best span.
    """
    if not chunks:
        raise ValueError("score_document requires at least one chunk")
    doc_id = chunks[0].doc_id
    if any(c.doc_id != doc_id for c in chunks):
        raise ValueError("score_document chunks must share one doc_id")
    ordered = sorted(chunks, key=lambda c: c.chunk_index)
    scores = [
        score_chunk(query, c, span_extractor, paraphrase_scorer, pn_weight) for c in ordered
    ]
    return _best_of(doc_id, scores)


def rank_documents(chunk_scores: Iterable[ChunkScore], k: int | None = None) -> list[RankedDocument]:
    """Aggregate chunk scores per document and sort the documents.

    Order: doc_score descending, then doc_id ascending; at most k results.
    """
    by_doc: dict[str, list[ChunkScore]] = {}
    for score in chunk_scores:
        by_doc.setdefault(score.doc_id, []).append(score)
    ranked = []
    for doc_id in sorted(by_doc):
        scores = sorted(by_doc[doc_id], key=lambda s: s.chunk_index)
        ranked.append(_best_of(doc_id, scores))
    ranked.sort(key=lambda d: (-d.doc_score, d.doc_id))
    return ranked if k is None else ranked[:k]


def score_chunks(
    query: str,
    chunks: Sequence[Chunk],
    span_extractor: SpanExtractor,
    paraphrase_scorer: ParaphraseScorer,
    pn_weight: float = 0.3,
    workers: int = 1,
    on_error: OnError | None = None,
) -> list[ChunkScore]:
    """Score every chunk, in input order; failed chunks score 0 and are reported."""

    def safe(chunk: Chunk) -> ChunkScore:
        try:
            return score_chunk(query, chunk, span_extractor, paraphrase_scorer, pn_weight)
        except ScorerError as exc:
            log.warning("chunk (%s, %d) scored 0: %s", chunk.doc_id, chunk.chunk_index, exc)
            if on_error is not None:
                on_error(chunk, exc)
            return _zero_score(chunk)

    if workers <= 1:
        return [safe(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(safe, chunks))


def retrieve(
    query: str,
    corpus: CorpusIndex,
    span_extractor: SpanExtractor,
    paraphrase_scorer: ParaphraseScorer,
    k: int = 3,
    pn_weight: float = 0.3,
    lexicon: KeywordLexicon | None = None,
    embedding: EmbeddingProvider | None = None,
    cutoff: float = 0.75,
    workers: int = 1,
    on_error: OnError | None = None,
) -> list[RankedDocument]:
    """Rank the corpus documents for a query; top-k by document score.

    When an embedding provider (and lexicon) is configured, the query is
    first rewritten toward the lexicon keywords and the rewritten form
    drives the whole pipeline.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(corpus) == 0:
        raise EmptyCorpus("retrieve called on an empty corpus")
    effective_query = query
    if embedding is not None and lexicon is not None:
        effective_query = rewrite_unseen_query(query, lexicon, embedding, cutoff).rewritten_query
    chunks = list(corpus.chunks())
    scores = score_chunks(
        effective_query, chunks, span_extractor, paraphrase_scorer, pn_weight, workers, on_error
    )
    return rank_documents(scores, k)
