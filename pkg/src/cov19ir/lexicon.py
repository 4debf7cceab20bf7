"""Keyword lexicon: synonym mapping, query keyword extraction, unseen-query
rewriting via embedding similarity, and proper-noun extraction.

Lexicon files are JSON objects ``{"keywords": [...], "mapping": {kw: [syn,..]}}``.
Matching is whole-word and case-insensitive; no stemming.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol

from .errors import MalformedLexicon
from .tokens import (
    STOPWORDS,
    has_digit,
    has_internal_upper,
    is_all_caps,
    is_capitalized,
    nonspace_spans,
    strip_outer_punct,
    word_token_spans,
    word_tokens,
)


@dataclass(frozen=True)
class KeywordLexicon:
    """Canonical keywords plus a lowercase synonym -> keyword mapping."""

    keywords: tuple[str, ...]
    synonym_map: Mapping[str, str]

    def canonical(self, word: str) -> str | None:
        return self.synonym_map.get(word.lower())

    def synonyms_of(self, keyword: str) -> list[str]:
        return [syn for syn, kw in self.synonym_map.items() if kw == keyword]


class EmbeddingProvider(Protocol):
    """Word-similarity source; returns None when either word is out of vocabulary."""

    def similarity(self, word_a: str, word_b: str) -> float | None: ...


@dataclass(frozen=True)
class RewriteResult:
    rewritten_query: str
    substitutions: tuple[tuple[str, str, float], ...]
    matched_keywords: tuple[str, ...]


def build_lexicon(keywords: list[str], mapping: Mapping[str, list[str]]) -> KeywordLexicon:
    """Validate and normalize a keyword list + mapping into a lexicon."""
    canon: list[str] = []
    seen = set()
    for kw in keywords:
        if not isinstance(kw, str) or not kw.strip():
            raise MalformedLexicon(f"keyword is not a nonempty string: {kw!r}")
        low = kw.strip().lower()
        if low in seen:
            raise MalformedLexicon(f"duplicate keyword {low!r}")
        seen.add(low)
        canon.append(low)

    synonym_map: dict[str, str] = {kw: kw for kw in canon}
    for target, synonyms in mapping.items():
        target_low = str(target).strip().lower()
        if target_low not in seen:
            raise MalformedLexicon(f"mapping target {target_low!r} is not a keyword")
        if not isinstance(synonyms, list):
            raise MalformedLexicon(f"mapping for {target_low!r} is not a list")
        for syn in synonyms:
            if not isinstance(syn, str) or not syn.strip():
                raise MalformedLexicon(f"synonym is not a nonempty string: {syn!r}")
            syn_low = syn.strip().lower()
            existing = synonym_map.get(syn_low)
            if existing is not None and existing != target_low:
                raise MalformedLexicon(
                    f"synonym {syn_low!r} maps to both {existing!r} and {target_low!r}"
                )
            synonym_map[syn_low] = target_low
    return KeywordLexicon(tuple(canon), synonym_map)


def load_lexicon(path: str | Path) -> KeywordLexicon:
    """Load a lexicon file; raises MalformedLexicon on any invariant violation."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedLexicon(f"invalid JSON: {exc}") from exc
    if not isinstance(data, Mapping):
        raise MalformedLexicon("lexicon file is not a JSON object")
    keywords = data.get("keywords")
    mapping = data.get("mapping", {})
    if not isinstance(keywords, list):
        raise MalformedLexicon("'keywords' must be a list")
    if not isinstance(mapping, Mapping):
        raise MalformedLexicon("'mapping' must be an object")
    return build_lexicon(keywords, mapping)


def save_lexicon(lex: KeywordLexicon, path: str | Path) -> None:
    mapping: dict[str, list[str]] = {kw: [] for kw in lex.keywords}
    for syn, kw in lex.synonym_map.items():
        mapping[kw].append(syn)
    payload = {"keywords": list(lex.keywords), "mapping": mapping}
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8")


def extract_keywords(query: str, lex: KeywordLexicon) -> list[str]:
    """Canonical keywords whose synonyms occur as whole-word tokens of the query."""
    found: list[str] = []
    seen = set()
    for token in word_tokens(query):
        keyword = lex.synonym_map.get(token)
        if keyword is not None and keyword not in seen:
            seen.add(keyword)
            found.append(keyword)
    return found


def rewrite_unseen_query(
    query: str,
    lex: KeywordLexicon,
    emb: EmbeddingProvider,
    cutoff: float = 0.75,
) -> RewriteResult:
    """Replace non-synonym query words by their most similar keyword.

    A word is substituted when its best keyword similarity is >= cutoff;
    ties go to the keyword earliest in the lexicon's keyword order.
    Out-of-vocabulary words (similarity None) are never substituted.
    """
    if not 0.0 < cutoff <= 1.0:
        raise ValueError(f"cutoff must be in (0, 1], got {cutoff}")
    pieces: list[str] = []
    substitutions: list[tuple[str, str, float]] = []
    last = 0
    for token, start, end in word_token_spans(query):
        if token in lex.synonym_map:
            continue
        best_kw: str | None = None
        best_sim = float("-inf")
        for kw in lex.keywords:
            sim = emb.similarity(token, kw)
            if sim is not None and sim > best_sim:
                best_sim = sim
                best_kw = kw
        if best_kw is None or best_sim < cutoff:
            continue
        original = query[start:end]
        pieces.append(query[last:start])
        pieces.append(best_kw)
        last = end
        substitutions.append((original, best_kw, best_sim))
    pieces.append(query[last:])
    rewritten = "".join(pieces)
    return RewriteResult(
        rewritten_query=rewritten,
        substitutions=tuple(substitutions),
        matched_keywords=tuple(extract_keywords(rewritten, lex)),
    )


def extract_proper_nouns(query: str) -> list[str]:
    """Heuristic proper-noun terms of a query, order preserved, deduplicated.

    A token qualifies when it carries a digit or an internal capital, is
    all-caps of length >= 2, or is a capitalized non-initial non-stopword.
    """
    out: list[str] = []
    seen = set()
    position = 0
    for span_start, span_end in nonspace_spans(query):
        start, end = strip_outer_punct(query, span_start, span_end)
        if start >= end:
            continue
        token = query[start:end]
        position += 1
        if has_digit(token) or has_internal_upper(token):
            qualifies = True
        elif is_all_caps(token):
            qualifies = True
        else:
            qualifies = (
                position > 1 and is_capitalized(token) and token.lower() not in STOPWORDS
            )
        if qualifies and token not in seen:
            seen.add(token)
            out.append(token)
    return out


class TableEmbedding:
    """Lookup-table embedding stub: symmetric pair table, identity 1.0."""

    def __init__(self, pairs: Mapping[tuple[str, str], float]) -> None:
        self._table: dict[tuple[str, str], float] = {}
        self._vocab: set[str] = set()
        for (a, b), sim in pairs.items():
            a, b = a.lower(), b.lower()
            self._table[(a, b)] = sim
            self._table[(b, a)] = sim
            self._vocab.update((a, b))

    def similarity(self, word_a: str, word_b: str) -> float | None:
        a, b = word_a.lower(), word_b.lower()
        if a == b:
            return 1.0 if a in self._vocab else None
        return self._table.get((a, b))


class WordVectorEmbedding:
    """Cosine similarity over word vectors in text format: 'word v1 v2 ...'."""

    def __init__(self, vectors: Mapping[str, list[float]]) -> None:
        self._vectors = {w.lower(): v for w, v in vectors.items()}

    @classmethod
    def from_file(cls, path: str | Path) -> "WordVectorEmbedding":
        vectors: dict[str, list[float]] = {}
        with Path(path).open(encoding="utf-8") as handle:
            for line in handle:
                parts = line.split()
                if len(parts) < 2:
                    continue
                try:
                    vectors[parts[0]] = [float(x) for x in parts[1:]]
                except ValueError:
                    continue  # header line of word2vec text format
        return cls(vectors)

    def similarity(self, word_a: str, word_b: str) -> float | None:
        va = self._vectors.get(word_a.lower())
        vb = self._vectors.get(word_b.lower())
        if va is None or vb is None or len(va) != len(vb):
            return None
        dot = sum(x * y for x, y in zip(va, vb))
        norm_a = sum(x * x for x in va) ** 0.5
        norm_b = sum(y * y for y in vb) ** 0.5
        if norm_a == 0.0 or norm_b == 0.0:
            return None
        return max(-1.0, min(1.0, dot / (norm_a * norm_b)))
