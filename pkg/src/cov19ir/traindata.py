"""Rule-based trainfile generation: entity recognition, keyword-relevant
line selection, extractive-QA triplet construction and sentence-pair
(positive/negative) construction with seeded shuffling.

The manual line-selection step is automated here: an entity is relevant
to a keyword when its enclosing sentence also contains one of that
keyword's synonyms, and the enclosing sentences become the answer lines.
External annotation files can replace the rule-based recognizer.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .corpus import Chunk
from .errors import EmptySquad, MalformedAnnotations, NoTriplets
from .lexicon import KeywordLexicon, extract_keywords
from .sentences import DEFAULT_ABBREVIATIONS, Sentence, split_sentences
from .tokens import (
    STOPWORDS,
    has_digit,
    has_internal_upper,
    is_capitalized,
    nonspace_spans,
    strip_outer_punct,
    word_tokens,
)

log = logging.getLogger(__name__)

__all__ = [
    "Sentence",
    "split_sentences",
    "DEFAULT_ABBREVIATIONS",
    "Entity",
    "SquadTriplet",
    "SquadFile",
    "MrpcPair",
    "MrpcFile",
    "EntityRecognizer",
    "recognize_entities",
    "annotations_recognizer",
    "select_keyword_lines",
    "build_squad",
    "build_mrpc",
    "load_squad",
    "validate_squad",
    "validate_mrpc",
    "content_hash",
    "DEFAULT_TERM_LIST",
]

# Lowercase terms that count as entities even without capitalization.
# Empty by default; callers configure domain-specific lists.
DEFAULT_TERM_LIST: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Entity:
    text: str
    start_char: int
    end_char: int
    label: str = "RULE"


@dataclass(frozen=True)
class SquadTriplet:
    """(question, context) pair with one or more in-context answers."""

    id: str
    question: str
    context: str
    answers: tuple[tuple[str, int], ...]
    doc_id: str = ""


@dataclass
class SquadFile:
    triplets: list[SquadTriplet] = field(default_factory=list)

    def to_dict(self) -> dict:
        data: list[dict] = []
        doc_entry: dict[str, dict] = {}
        for triplet in self.triplets:
            title = triplet.doc_id
            if title not in doc_entry:
                doc_entry[title] = {"title": title, "paragraphs": []}
                data.append(doc_entry[title])
            paragraphs = doc_entry[title]["paragraphs"]
            paragraph = next(
                (p for p in paragraphs if p["context"] == triplet.context), None
            )
            if paragraph is None:
                paragraph = {"context": triplet.context, "qas": []}
                paragraphs.append(paragraph)
            paragraph["qas"].append(
                {
                    "id": triplet.id,
                    "question": triplet.question,
                    "answers": [
                        {"text": text, "answer_start": start}
                        for text, start in triplet.answers
                    ],
                }
            )
        return {"version": "1.1", "data": data}

    def write(self, path: str | Path) -> None:
        payload = json.dumps(self.to_dict(), ensure_ascii=False, indent=2)
        Path(path).write_text(payload + "\n", encoding="utf-8")


@dataclass(frozen=True)
class MrpcPair:
    label: int
    id_a: str
    id_b: str
    sentence_a: str
    sentence_b: str


MRPC_HEADER = "Quality\t#1 ID\t#2 ID\t#1 String\t#2 String"


def _tsv_safe(text: str) -> str:
    return text.replace("\t", " ").replace("\r", " ").replace("\n", " ")


@dataclass
class MrpcFile:
    pairs: list[MrpcPair] = field(default_factory=list)
    # Triplet id per pair, parallel to ``pairs``; kept for validation only.
    origins: list[str] = field(default_factory=list)

    def write(self, path: str | Path) -> None:
        lines = [MRPC_HEADER]
        for pair in self.pairs:
            lines.append(
                "\t".join(
                    (
                        str(pair.label),
                        pair.id_a,
                        pair.id_b,
                        _tsv_safe(pair.sentence_a),
                        _tsv_safe(pair.sentence_b),
                    )
                )
            )
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def content_hash(*parts: str) -> str:
    digest = hashlib.sha256("\x00".join(parts).encode("utf-8")).hexdigest()
    return digest[:16]


EntityRecognizer = Callable[[str], list[Entity]]


def _qualifies(token: str, sentence_initial: bool, term_list: frozenset[str]) -> bool:
    if token.lower() in term_list:
        return True
    if has_digit(token) or has_internal_upper(token):
        return True
    if sentence_initial:
        return False
    return is_capitalized(token) and token.lower() not in STOPWORDS


def recognize_entities(
    text: str, term_list: frozenset[str] = DEFAULT_TERM_LIST
) -> list[Entity]:
    """Rule-based recognizer: maximal runs of qualifying tokens.

    A token qualifies when it is capitalized (and not sentence-initial),
    carries a digit or internal capital, or matches the term list.
    """
    sentence_starts = {s.start_char for s in split_sentences(text)}
    entities: list[Entity] = []
    run_start: int | None = None
    run_end = 0
    for span_start, span_end in nonspace_spans(text):
        start, end = strip_outer_punct(text, span_start, span_end)
        token = text[start:end]
        ok = bool(token) and _qualifies(token, span_start in sentence_starts, term_list)
        if ok:
            if run_start is None:
                run_start = start
            run_end = end
        elif run_start is not None:
            entities.append(Entity(text[run_start:run_end], run_start, run_end))
            run_start = None
    if run_start is not None:
        entities.append(Entity(text[run_start:run_end], run_start, run_end))
    return entities


def annotations_recognizer(path: str | Path) -> EntityRecognizer:
    """Recognizer backed by an external line-delimited annotations file.

    Records are ``{"context_hash": sha256(context), "entities": [...]}``;
    contexts without a record fall back to the rule-based recognizer.
    Offset violations raise MalformedAnnotations.
    """
    by_hash: dict[str, list[dict]] = {}
    with Path(path).open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                by_hash[record["context_hash"]] = list(record["entities"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise MalformedAnnotations(f"line {lineno}: {exc}") from exc

    def recognize(text: str) -> list[Entity]:
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        records = by_hash.get(digest)
        if records is None:
            return recognize_entities(text)
        entities = []
        for record in records:
            try:
                entity = Entity(
                    text=str(record["text"]),
                    start_char=int(record["start"]),
                    end_char=int(record["end"]),
                    label=str(record.get("label", "EXTERNAL")),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedAnnotations(f"bad entity record: {record!r}") from exc
            if text[entity.start_char : entity.end_char] != entity.text:
                raise MalformedAnnotations(
                    f"entity offsets do not reproduce text: {record!r}"
                )
            entities.append(entity)
        return entities

    return recognize


def _contains_synonym(sentence_tokens: set[str], synonyms: Iterable[str]) -> bool:
    return any(syn in sentence_tokens for syn in synonyms)


def select_keyword_lines(
    context: str,
    keyword: str,
    lex: KeywordLexicon,
    recognizer: EntityRecognizer = recognize_entities,
) -> list[Sentence]:
    """Sentences whose entities co-occur with a synonym of the keyword.

    With no entities anywhere in the context, falls back to the sentences
    containing a synonym directly.
    """
    if keyword not in lex.keywords:
        raise ValueError(f"keyword {keyword!r} is not canonical in the lexicon")
    synonyms = lex.synonyms_of(keyword)
    sentences = split_sentences(context)
    entities = recognizer(context)
    token_sets = [set(word_tokens(s.text)) for s in sentences]
    if not entities:
        return [s for s, toks in zip(sentences, token_sets) if _contains_synonym(toks, synonyms)]
    selected: list[Sentence] = []
    for sentence, toks in zip(sentences, token_sets):
        if not _contains_synonym(toks, synonyms):
            continue
        has_entity = any(
            sentence.start_char <= e.start_char and e.end_char <= sentence.end_char
            for e in entities
        )
        if has_entity:
            selected.append(sentence)
    return selected


def build_squad(
    chunks: Sequence[Chunk],
    queries: Sequence[str],
    lex: KeywordLexicon,
    recognizer: EntityRecognizer = recognize_entities,
) -> SquadFile:
    """Emit one multi-answer triplet per (query, chunk) pair that selects lines.

    Emission order is query order x chunk order; answer offsets index into
    the chunk text. Zero triplets raise NoTriplets.
    """
    squad = SquadFile()
    for query in queries:
        keywords = extract_keywords(query, lex)
        if not keywords:
            continue
        for chunk in chunks:
            picked: list[Sentence] = []
            seen_offsets: set[int] = set()
            for keyword in keywords:
                for sentence in select_keyword_lines(chunk.text, keyword, lex, recognizer):
                    if sentence.start_char not in seen_offsets:
                        seen_offsets.add(sentence.start_char)
                        picked.append(sentence)
            if not picked:
                continue
            picked.sort(key=lambda s: s.start_char)
            squad.triplets.append(
                SquadTriplet(
                    id=content_hash(query, chunk.text),
                    question=query,
                    context=chunk.text,
                    answers=tuple((s.text, s.start_char) for s in picked),
                    doc_id=chunk.doc_id,
                )
            )
    if not squad.triplets:
        raise NoTriplets("no (query, chunk) pair selected any answer line")
    return squad


def load_squad(path: str | Path) -> SquadFile:
    """Parse a v1.1-layout trainfile back into triplets."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    squad = SquadFile()
    for article in data.get("data", []):
        title = article.get("title", "")
        for paragraph in article.get("paragraphs", []):
            context = paragraph["context"]
            for qa in paragraph.get("qas", []):
                squad.triplets.append(
                    SquadTriplet(
                        id=qa["id"],
                        question=qa["question"],
                        context=context,
                        answers=tuple(
                            (a["text"], int(a["answer_start"])) for a in qa["answers"]
                        ),
                        doc_id=title,
                    )
                )
    return squad


def _negative_candidates(triplet: SquadTriplet, answer_texts: Sequence[str]) -> list[str]:
    """Context sentences that occur in no answer of the triplet's question."""
    candidates = []
    seen: set[str] = set()
    for sentence in split_sentences(triplet.context):
        text = sentence.text
        if text in seen or any(text in answer for answer in answer_texts):
            continue
        seen.add(text)
        candidates.append(text)
    return candidates


def build_mrpc(squad: SquadFile, seed: int, neg_ratio: float = 1.0) -> MrpcFile:
    """Positive pairs from answer sentences, sampled in-context negatives.

    Positives: every constituent sentence of every answer, paired with the
    question (label 1). Negatives: context sentences absent from all of the
    question's answers (label 0), at most floor(neg_ratio x positives) per
    triplet, seed-sampled. All pairs are shuffled by the same seeded
    generator, so equal inputs and seed give byte-identical files.
    """
    if not squad.triplets:
        raise EmptySquad("cannot build sentence pairs from an empty trainfile")
    if neg_ratio < 0:
        raise ValueError(f"neg_ratio must be >= 0, got {neg_ratio}")
    answers_by_question: dict[str, list[str]] = {}
    for triplet in squad.triplets:
        bucket = answers_by_question.setdefault(triplet.question, [])
        bucket.extend(text for text, _ in triplet.answers)

    rng = random.Random(seed)
    pairs: list[MrpcPair] = []
    origins: list[str] = []

    def add(label: int, question: str, sentence: str, origin: str) -> None:
        pairs.append(
            MrpcPair(
                label=label,
                id_a=content_hash("q", question),
                id_b=content_hash("s", sentence),
                sentence_a=question,
                sentence_b=sentence,
            )
        )
        origins.append(origin)

    for triplet in squad.triplets:
        positives: list[str] = []
        seen_pos: set[str] = set()
        for answer_text, _ in triplet.answers:
            for sentence in split_sentences(answer_text):
                if sentence.text not in seen_pos:
                    seen_pos.add(sentence.text)
                    positives.append(sentence.text)
        for text in positives:
            add(1, triplet.question, text, triplet.id)

        candidates = _negative_candidates(triplet, answers_by_question[triplet.question])
        quota = min(len(candidates), int(neg_ratio * len(positives)))
        for text in rng.sample(candidates, quota):
            add(0, triplet.question, text, triplet.id)

    order = list(range(len(pairs)))
    rng.shuffle(order)
    return MrpcFile([pairs[i] for i in order], [origins[i] for i in order])


@dataclass
class ValidationReport:
    total: int
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_squad(squad: SquadFile) -> ValidationReport:
    """Check the answer-at-offset invariant for every emitted answer."""
    total = 0
    violations = []
    for triplet in squad.triplets:
        if not triplet.answers:
            violations.append(f"triplet {triplet.id}: no answers")
        for text, start in triplet.answers:
            total += 1
            if triplet.context[start : start + len(text)] != text:
                violations.append(
                    f"triplet {triplet.id}: answer at {start} does not match context"
                )
    return ValidationReport(total, violations)


def validate_mrpc(mrpc: MrpcFile, squad: SquadFile, neg_ratio: float = 1.0) -> ValidationReport:
    """Brute-force pair soundness against the source trainfile.

    Label 1: sentence_b is a constituent sentence of some answer for the
    question. Label 0: sentence_b occurs in the triplet's context and in no
    answer of the question. Per-triplet negative counts must sit within one
    pair of neg_ratio x positives.
    """
    by_id = {t.id: t for t in squad.triplets}
    answers_by_question: dict[str, list[str]] = {}
    constituents_by_question: dict[str, set[str]] = {}
    for triplet in squad.triplets:
        texts = answers_by_question.setdefault(triplet.question, [])
        parts = constituents_by_question.setdefault(triplet.question, set())
        for answer_text, _ in triplet.answers:
            texts.append(answer_text)
            parts.update(s.text for s in split_sentences(answer_text))

    violations = []
    pos_count: dict[str, int] = {}
    neg_count: dict[str, int] = {}
    for position, pair in enumerate(mrpc.pairs):
        origin = mrpc.origins[position] if position < len(mrpc.origins) else ""
        triplet = by_id.get(origin)
        if triplet is None:
            violations.append(f"pair {position}: unknown origin triplet {origin!r}")
            continue
        if pair.sentence_a != triplet.question:
            violations.append(f"pair {position}: sentence_a is not the origin question")
            continue
        if pair.label == 1:
            pos_count[origin] = pos_count.get(origin, 0) + 1
            if pair.sentence_b not in constituents_by_question.get(pair.sentence_a, set()):
                violations.append(
                    f"pair {position}: positive sentence is not an answer constituent"
                )
        elif pair.label == 0:
            neg_count[origin] = neg_count.get(origin, 0) + 1
            if pair.sentence_b not in {s.text for s in split_sentences(triplet.context)}:
                violations.append(f"pair {position}: negative sentence not in context")
            elif any(
                pair.sentence_b in answer
                for answer in answers_by_question.get(pair.sentence_a, [])
            ):
                violations.append(f"pair {position}: negative sentence occurs in an answer")
        else:
            violations.append(f"pair {position}: label {pair.label} outside {{0, 1}}")

    for origin, positives in pos_count.items():
        triplet = by_id.get(origin)
        if triplet is None:
            continue
        negatives = neg_count.get(origin, 0)
        pool = _negative_candidates(triplet, answers_by_question[triplet.question])
        quota = min(len(pool), int(neg_ratio * positives))
        if abs(negatives - quota) > 1:
            violations.append(
                f"triplet {origin}: {negatives} negatives, expected about {quota} "
                f"(ratio {neg_ratio} of {positives} positives, {len(pool)} candidates)"
            )
    return ValidationReport(len(mrpc.pairs), violations)
