"""CORD-19-format corpus parsing and overlapping token-window chunking.

Documents are parsed from ``document_parses`` JSON records. Chunks are
windows over the whitespace tokens of ``full_text()`` and carry exact
character offsets: ``full_text[start_char : start_char + len(text)] == text``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping

from .errors import EmptyCorpus, MalformedRecord
from .tokens import nonspace_spans

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Document:
    """One scholarly article."""

    doc_id: str
    title: str
    abstract: str = ""
    body: str = ""

    def full_text(self) -> str:
        return f"{self.title}\n{self.abstract}\n{self.body}"


@dataclass(frozen=True)
class Chunk:
    """A contiguous context window of a document."""

    doc_id: str
    chunk_index: int
    text: str
    start_char: int


@dataclass(frozen=True)
class ChunkPolicy:
    """Token-window parameters; tokens are maximal non-whitespace runs."""

    max_tokens: int = 128
    overlap_tokens: int = 32

    def __post_init__(self) -> None:
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")
        if self.overlap_tokens < 0:
            raise ValueError(f"overlap_tokens must be >= 0, got {self.overlap_tokens}")
        if self.overlap_tokens >= self.max_tokens:
            raise ValueError(
                f"overlap_tokens ({self.overlap_tokens}) must be smaller than "
                f"max_tokens ({self.max_tokens})"
            )

    @property
    def stride(self) -> int:
        return self.max_tokens - self.overlap_tokens


def _join_paragraphs(value: object, record_name: str) -> str:
    if value is None:
        return ""
    if not isinstance(value, list):
        raise MalformedRecord(f"{record_name} is not a list of paragraphs")
    parts = []
    for entry in value:
        if not isinstance(entry, Mapping) or not isinstance(entry.get("text"), str):
            raise MalformedRecord(f"{record_name} entry lacks a 'text' string")
        parts.append(entry["text"])
    return " ".join(parts)


def parse_document(record: str | bytes | Mapping) -> Document:
    """Parse one article record (JSON text or already-decoded mapping)."""
    if isinstance(record, (str, bytes)):
        try:
            record = json.loads(record)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(f"invalid JSON: {exc}") from exc
    if not isinstance(record, Mapping):
        raise MalformedRecord("record is not a JSON object")

    doc_id = record.get("paper_id")
    if not isinstance(doc_id, str) or not doc_id:
        raise MalformedRecord("missing or empty paper_id")

    metadata = record.get("metadata") or {}
    if not isinstance(metadata, Mapping):
        raise MalformedRecord("metadata is not an object")
    title = metadata.get("title") or ""
    if not isinstance(title, str):
        raise MalformedRecord("metadata.title is not a string")

    abstract = _join_paragraphs(record.get("abstract"), "abstract")
    body = _join_paragraphs(record.get("body_text"), "body_text")
    return Document(doc_id=doc_id, title=title, abstract=abstract, body=body)


def chunk_document(doc: Document, policy: ChunkPolicy | None = None) -> list[Chunk]:
    """Window the whitespace tokens of full_text into overlapping chunks."""
    policy = policy or ChunkPolicy()
    text = doc.full_text()
    spans = nonspace_spans(text)
    total = len(spans)
    if total == 0:
        return []
    # ceil((total - max) / stride) + 1 windows; the last may be shorter.
    excess = max(0, total - policy.max_tokens)
    count = -(-excess // policy.stride) + 1
    chunks = []
    for i in range(count):
        first = i * policy.stride
        last = min(first + policy.max_tokens, total) - 1
        start = spans[first][0]
        end = spans[last][1]
        chunks.append(Chunk(doc.doc_id, i, text[start:end], start))
    return chunks


class CorpusIndex:
    """Chunks grouped by document, iterated in doc_id order.

    Built either from parsed documents (directory ingestion) or straight
    from a chunk index file; in the latter case ``documents`` is empty.
    """

    def __init__(
        self,
        chunks_by_doc: dict[str, list[Chunk]],
        documents: dict[str, Document] | None = None,
        skipped: list[str] | None = None,
    ) -> None:
        self._chunks_by_doc = {doc_id: list(chunks) for doc_id, chunks in chunks_by_doc.items()}
        self.documents = dict(documents or {})
        self.skipped = list(skipped or [])
        self._doc_ids = sorted(self._chunks_by_doc)

    @classmethod
    def from_documents(
        cls,
        documents: list[Document],
        policy: ChunkPolicy | None = None,
        skipped: list[str] | None = None,
    ) -> "CorpusIndex":
        policy = policy or ChunkPolicy()
        by_doc = {doc.doc_id: chunk_document(doc, policy) for doc in documents}
        return cls(by_doc, {doc.doc_id: doc for doc in documents}, skipped)

    @property
    def doc_ids(self) -> list[str]:
        return list(self._doc_ids)

    def __len__(self) -> int:
        return len(self._doc_ids)

    def __iter__(self) -> Iterator[Document]:
        for doc_id in self._doc_ids:
            if doc_id in self.documents:
                yield self.documents[doc_id]

    def chunks_for(self, doc_id: str) -> list[Chunk]:
        return list(self._chunks_by_doc[doc_id])

    def chunks(self) -> Iterator[Chunk]:
        for doc_id in self._doc_ids:
            yield from self._chunks_by_doc[doc_id]

    @property
    def chunk_count(self) -> int:
        return sum(len(c) for c in self._chunks_by_doc.values())


def load_corpus(path: str | Path, policy: ChunkPolicy | None = None) -> CorpusIndex:
    """Load a corpus from a record directory or a chunk index file.

    Malformed records are skipped and reported via the returned index;
    iteration order is deterministic (lexicographic by doc_id).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"corpus path does not exist: {path}")
    if path.is_dir():
        return _load_record_dir(path, policy or ChunkPolicy())
    return _load_index_file(path)


def _load_record_dir(path: Path, policy: ChunkPolicy) -> CorpusIndex:
    documents: dict[str, Document] = {}
    skipped: list[str] = []
    for record_path in sorted(path.glob("*.json")):
        try:
            doc = parse_document(record_path.read_text(encoding="utf-8"))
        except MalformedRecord as exc:
            skipped.append(f"{record_path.name}: {exc}")
            log.warning("skipping malformed record %s: %s", record_path.name, exc)
            continue
        if doc.doc_id in documents:
            skipped.append(f"{record_path.name}: duplicate doc_id {doc.doc_id!r}")
            log.warning("skipping %s: duplicate doc_id %r", record_path.name, doc.doc_id)
            continue
        documents[doc.doc_id] = doc
    if not documents:
        raise EmptyCorpus(f"no valid documents under {path}")
    ordered = [documents[doc_id] for doc_id in sorted(documents)]
    return CorpusIndex.from_documents(ordered, policy, skipped)


def _load_index_file(path: Path) -> CorpusIndex:
    chunks_by_doc: dict[str, list[Chunk]] = {}
    skipped: list[str] = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                chunk = Chunk(
                    doc_id=rec["doc_id"],
                    chunk_index=int(rec["chunk_index"]),
                    text=rec["text"],
                    start_char=int(rec["start_char"]),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                skipped.append(f"line {lineno}: {exc}")
                log.warning("skipping malformed index line %d: %s", lineno, exc)
                continue
            chunks_by_doc.setdefault(chunk.doc_id, []).append(chunk)
    if not chunks_by_doc:
        raise EmptyCorpus(f"no chunks in index file {path}")
    for chunks in chunks_by_doc.values():
        chunks.sort(key=lambda c: c.chunk_index)
    return CorpusIndex(chunks_by_doc, skipped=skipped)


def write_chunk_index(index: CorpusIndex, path: str | Path) -> int:
    """Write one JSON record per chunk, newline terminated; returns the count."""
    path = Path(path)
    count = 0
    with path.open("w", encoding="utf-8") as handle:
        for chunk in index.chunks():
            record = {
                "doc_id": chunk.doc_id,
                "chunk_index": chunk.chunk_index,
                "start_char": chunk.start_char,
                "text": chunk.text,
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count
