"""Scorer contracts and backends.

Two roles: span extraction (pick an answer span from a context) and
paraphrase scoring (semantic equivalence of two texts on a 0-1 scale).
Each role has a deterministic lexical backend and a remote client that
speaks the inference-sidecar wire protocol. Responses from remote
backends are validated against the span/score invariants before use, so
a faulty model server cannot corrupt rankings silently.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Protocol

import httpx

from .errors import ProtocolError, RemoteError, TransportError
from .sentences import split_sentences
from .tokens import alnum_token_set

EMPTY_SPAN_SCORE = 0.0


@dataclass(frozen=True)
class ScoredSpan:
    """An extracted answer span; offsets index into the source context."""

    text: str
    start_char: int
    end_char: int
    score: float

    @classmethod
    def empty(cls) -> "ScoredSpan":
        return cls("", 0, 0, EMPTY_SPAN_SCORE)

    def is_empty(self) -> bool:
        return self.start_char == self.end_char


def validate_span(span: ScoredSpan, context: str) -> ScoredSpan:
    """Check the ScoredSpan invariants against ``context``; raise ProtocolError."""
    if not 0.0 <= span.score <= 1.0:
        raise ProtocolError(f"span score {span.score} outside [0, 1]")
    if span.is_empty():
        if span.text or span.start_char != 0 or span.score != 0.0:
            raise ProtocolError("empty span must be text='', start=end=0, score=0")
        return span
    if span.start_char < 0 or span.end_char > len(context):
        raise ProtocolError(
            f"span offsets [{span.start_char}, {span.end_char}) outside context"
        )
    if context[span.start_char : span.end_char] != span.text:
        raise ProtocolError("span offsets do not reproduce span text")
    return span


class SpanExtractor(Protocol):
    def extract(self, query: str, context: str) -> ScoredSpan: ...


class ParaphraseScorer(Protocol):
    def score(self, text_a: str, text_b: str) -> float: ...


def lexical_extract_span(query: str, context: str) -> ScoredSpan:
    """Deterministic oracle: the earliest sentence with maximal token overlap.

    overlap(s) = |tok(query) & tok(s)| / max(1, |tok(query)|), with tokens
    being lowercase alphanumeric runs. All-zero overlaps yield the empty span.
    """
    query_tokens = alnum_token_set(query)
    denom = max(1, len(query_tokens))
    best: ScoredSpan | None = None
    for sentence in split_sentences(context):
        overlap = len(query_tokens & alnum_token_set(sentence.text)) / denom
        if best is None or overlap > best.score:
            best = ScoredSpan(sentence.text, sentence.start_char, sentence.end_char, overlap)
    if best is None or best.score == 0.0:
        return ScoredSpan.empty()
    return best


def lexical_paraphrase_score(text_a: str, text_b: str) -> float:
    """Jaccard similarity of lowercase token sets; both empty -> 1.0."""
    tokens_a = alnum_token_set(text_a)
    tokens_b = alnum_token_set(text_b)
    if not tokens_a and not tokens_b:
        return 1.0
    if not tokens_a or not tokens_b:
        return 0.0
    return len(tokens_a & tokens_b) / len(tokens_a | tokens_b)


class LexicalSpanExtractor:
    """SpanExtractor backend over the lexical oracle; pure and thread-safe."""

    def extract(self, query: str, context: str) -> ScoredSpan:
        return lexical_extract_span(query, context)


class LexicalParaphraseScorer:
    """ParaphraseScorer backend over the lexical oracle; pure and thread-safe."""

    def score(self, text_a: str, text_b: str) -> float:
        return lexical_paraphrase_score(text_a, text_b)


class RemoteScorerClient:
    """Shared HTTP plumbing for the sidecar wire protocol.

    Transport failures are retried up to ``retries`` extra attempts with a
    short backoff; non-2xx responses surface as RemoteError with the server
    message; malformed payloads surface as ProtocolError.
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = 30.0,
        retries: int = 2,
        concurrency: int = 8,
    ) -> None:
        self.endpoint = endpoint.rstrip("/")
        self.retries = retries
        limits = httpx.Limits(max_connections=concurrency)
        self._client = httpx.Client(timeout=timeout, limits=limits)

    def close(self) -> None:
        self._client.close()

    def post_json(self, path: str, payload: dict) -> dict:
        url = f"{self.endpoint}{path}"
        last_exc: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                response = self._client.post(url, json=payload)
            except httpx.HTTPError as exc:
                last_exc = exc
                if attempt < self.retries:
                    time.sleep(0.05 * (attempt + 1))
                continue
            if response.status_code // 100 != 2:
                raise RemoteError(
                    f"{url} returned {response.status_code}: {response.text[:200]}"
                )
            try:
                body = response.json()
            except ValueError as exc:
                raise ProtocolError(f"{url} returned non-JSON body") from exc
            if not isinstance(body, dict):
                raise ProtocolError(f"{url} returned a non-object body")
            return body
        raise TransportError(
            f"{url} unreachable after {self.retries + 1} attempts: {last_exc}"
        )


class RemoteSpanExtractor:
    """SpanExtractor over POST /v1/span; validates responses before returning."""

    def __init__(
        self,
        endpoint: str,
        timeout: float = 30.0,
        retries: int = 2,
        concurrency: int = 8,
    ) -> None:
        self._client = RemoteScorerClient(endpoint, timeout, retries, concurrency)

    def extract(self, query: str, context: str) -> ScoredSpan:
        if not context:
            return ScoredSpan.empty()
        body = self._client.post_json("/v1/span", {"query": query, "context": context})
        try:
            span = ScoredSpan(
                text=str(body["text"]),
                start_char=int(body["start"]),
                end_char=int(body["end"]),
                score=float(body["score"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed span response: {body!r}") from exc
        return validate_span(span, context)

    def close(self) -> None:
        self._client.close()


class RemoteParaphraseScorer:
    """ParaphraseScorer over POST /v1/paraphrase; rejects scores outside [0, 1]."""

    def __init__(
        self,
        endpoint: str,
        timeout: float = 30.0,
        retries: int = 2,
        concurrency: int = 8,
    ) -> None:
        self._client = RemoteScorerClient(endpoint, timeout, retries, concurrency)

    def score(self, text_a: str, text_b: str) -> float:
        body = self._client.post_json(
            "/v1/paraphrase", {"text_a": text_a, "text_b": text_b}
        )
        try:
            value = float(body["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed paraphrase response: {body!r}") from exc
        if not 0.0 <= value <= 1.0:
            raise ProtocolError(f"paraphrase score {value} outside [0, 1]")
        return value

    def close(self) -> None:
        self._client.close()
