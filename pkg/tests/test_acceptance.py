"""Acceptance criteria, one test per criterion.

Each test carries an ``acceptance`` marker; the conftest summary hook
prints one PASS/FAIL line per criterion at the end of the run. All
criteria here run on lexical backends only — no model server involved.
"""

import hashlib
import json
import math
import random
import time
from dataclasses import asdict

import pytest

from cov19ir.corpus import ChunkPolicy, CorpusIndex, Document, chunk_document
from cov19ir.lexicon import TableEmbedding, build_lexicon, extract_keywords, rewrite_unseen_query
from cov19ir.qa import answer
from cov19ir.retrieval import retrieve, score_chunk
from cov19ir.scoring import LexicalParaphraseScorer, LexicalSpanExtractor, lexical_extract_span
from cov19ir.sentences import split_sentences
from cov19ir.traindata import build_mrpc, build_squad, validate_squad

EXTRACTOR = LexicalSpanExtractor()
SCORER = LexicalParaphraseScorer()

VOCAB = [
    "fever", "cough", "virus", "spread", "cases", "trial", "dose", "cell",
    "lung", "test", "rate", "risk", "care", "ward", "gene", "host",
]
NOISE_VOCAB = [
    "orbit", "planet", "comet", "dust", "rock", "moon", "star", "flux",
    "tide", "core", "vent", "silt", "clay", "sand", "peak", "ridge",
]


def synthetic_corpus(rng, n_docs, min_tokens, max_tokens_per_doc, vocab, policy):
    docs = []
    for i in range(n_docs):
        count = rng.randint(min_tokens, max_tokens_per_doc)
        words = [rng.choice(vocab) for _ in range(count)]
        # sprinkle sentence terminators so the span extractor sees sentences
        text = ""
        for j, word in enumerate(words):
            text += word
            text += ". " if rng.random() < 0.15 else " "
        title = " ".join(rng.choice(vocab) for _ in range(3)) + "."
        docs.append(Document(f"doc{i:03d}", title, "", text.strip()))
    return CorpusIndex.from_documents(docs, policy)


@pytest.mark.acceptance("Aggregation oracle: retrieve == brute-force max over score_chunk (100 docs, exact)")
def test_aggregation_oracle():
    rng = random.Random(1234)
    policy = ChunkPolicy(16, 4)
    corpus = synthetic_corpus(rng, 100, 10, 230, VOCAB, policy)
    assert all(len(corpus.chunks_for(d)) <= 20 for d in corpus.doc_ids)
    query = "fever cough virus spread"

    started = time.perf_counter()
    ranked = retrieve(query, corpus, EXTRACTOR, SCORER, k=100)
    by_doc = {d.doc_id: d for d in ranked}
    for doc_id in corpus.doc_ids:
        # independent brute force: score every chunk directly, take the max
        best_score = 0.0
        best_index = None
        for chunk in corpus.chunks_for(doc_id):
            score = score_chunk(query, chunk, EXTRACTOR, SCORER).final_score
            if best_index is None or score > best_score:
                best_score, best_index = score, chunk.chunk_index
        got = by_doc[doc_id]
        assert got.doc_score == best_score, doc_id
        if best_score > 0.0:
            assert got.best_chunk_index == best_index, doc_id
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"aggregation oracle took {elapsed:.2f}s"


@pytest.mark.acceptance("Planted retrieval: doc sharing >=80% of query tokens ranks #1 in 100/100 trials")
def test_planted_retrieval():
    for trial in range(100):
        rng = random.Random(9000 + trial)
        query_words = rng.sample(VOCAB, 5)
        query = " ".join(query_words)
        planted_words = query_words[:4] + [rng.choice(NOISE_VOCAB)]  # 4/5 = 80%
        rng.shuffle(planted_words)
        planted_text = " ".join(planted_words).capitalize() + "."
        docs = [Document("planted", "Planted title.", "", planted_text)]
        for i in range(19):
            words = [rng.choice(NOISE_VOCAB) for _ in range(rng.randint(8, 30))]
            docs.append(Document(f"noise{i:02d}", "Noise title.", "", " ".join(words) + "."))
        corpus = CorpusIndex.from_documents(docs, ChunkPolicy(32, 8))

        started = time.perf_counter()
        ranked = retrieve(query, corpus, EXTRACTOR, SCORER, k=1)
        elapsed = time.perf_counter() - started
        assert ranked[0].doc_id == "planted", f"trial {trial}"
        assert ranked[0].doc_score > 0.0
        assert elapsed < 1.0, f"trial {trial} took {elapsed:.2f}s"


@pytest.mark.acceptance("QA argmax oracle: answer == exhaustive per-chunk argmax (<=500 chunks, exact)")
def test_qa_argmax_oracle():
    rng = random.Random(777)
    policy = ChunkPolicy(12, 3)
    corpus = synthetic_corpus(rng, 60, 20, 80, VOCAB, policy)
    total_chunks = corpus.chunk_count
    assert total_chunks <= 500
    query = "fever cough rate"

    started = time.perf_counter()
    result = answer(query, corpus, EXTRACTOR)
    # independent exhaustive argmax with the explicit tie rule
    best = None
    for chunk in corpus.chunks():
        span = lexical_extract_span(query, chunk.text)
        key = (-span.score, chunk.doc_id, chunk.chunk_index)
        if best is None or key < best[0]:
            best = (key, chunk, span)
    elapsed = time.perf_counter() - started
    assert result.answer == best[2]
    assert (result.doc_id, result.chunk_index) == (best[1].doc_id, best[1].chunk_index)
    assert elapsed < 2.0, f"qa oracle took {elapsed:.2f}s"


def enumerate_windows(total_tokens, max_tokens, overlap):
    """Independent window enumeration: stride until a window reaches the end."""
    if total_tokens == 0:
        return []
    stride = max_tokens - overlap
    windows = []
    first = 0
    while True:
        last = min(first + max_tokens, total_tokens)
        windows.append((first, last))
        if last >= total_tokens:
            return windows
        first += stride


@pytest.mark.acceptance("Chunker: reconstruction/offset soundness on 1000 random docs; count formula matches enumeration")
def test_chunker_properties_and_count_formula():
    rng = random.Random(4242)
    alphabet = "abcdefgh"
    for case in range(1000):
        words = [
            "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 7)))
            for _ in range(rng.randint(1, 90))
        ]
        separators = [" ", "  ", "\n", "\t ", " \n "]
        pieces = []
        for word in words:
            pieces.append(word)
            pieces.append(rng.choice(separators))
        body = "".join(pieces[:-1])
        doc = Document("d", words[0], "", body)
        max_tokens = rng.randint(2, 16)
        overlap = rng.randint(1, max_tokens - 1)
        chunks = chunk_document(doc, ChunkPolicy(max_tokens, overlap))
        full = doc.full_text()
        # offset soundness
        for chunk in chunks:
            assert full[chunk.start_char : chunk.start_char + len(chunk.text)] == chunk.text
        # reconstruction with overlaps deduplicated by offsets
        rebuilt = ""
        end = 0
        for chunk in chunks:
            if chunk.start_char < end:
                rebuilt += chunk.text[end - chunk.start_char :]
            else:
                rebuilt += chunk.text
            end = chunk.start_char + len(chunk.text)
        first = chunks[0].start_char
        assert rebuilt == full[first:end]
        assert not full[:first].strip() and not full[end:].strip()

    # chunk-count formula against independent enumeration, all T <= 200,
    # all valid (max_tokens, overlap) <= 32
    for total in range(0, 201):
        doc = Document("d", " ".join(f"w{i}" for i in range(total)), "", "")
        for max_tokens in range(1, 33):
            for overlap in range(0, max_tokens):
                got = len(chunk_document(doc, ChunkPolicy(max_tokens, overlap)))
                expected = len(enumerate_windows(total, max_tokens, overlap))
                assert got == expected, (total, max_tokens, overlap)
                if total >= 1:
                    stride = max_tokens - overlap
                    formula = math.ceil(max(0, total - max_tokens) / stride) + 1
                    assert got == formula, (total, max_tokens, overlap)


ACCEPTANCE_LEXICON = build_lexicon(
    ["structure", "symptoms"],
    {
        "structure": ["structure", "constituents", "composition"],
        "symptoms": ["symptoms", "effects", "diseases"],
    },
)

FIXTURE_DOCS = [
    Document(
        "virology01",
        "Viral disease overview.",
        "MERS-CoV causes severe symptoms in humans. Hospitals in Korea reported cases.",
        "The composition of SARS-CoV-2 includes spike proteins. Weather was fine that season.",
    ),
    Document(
        "trials02",
        "Vaccine trial notes.",
        "Trial V-01 reduced harmful effects in Brazil. Placebo groups stayed stable.",
        "Funding arrived late in autumn. Nothing else changed.",
    ),
    Document(
        "plain03",
        "Unrelated report.",
        "This file mentions nothing relevant. Another plain line follows.",
        "",
    ),
]
FIXTURE_QUERIES = ["What are the symptoms?", "What is the structure?"]


def fixture_chunks():
    corpus = CorpusIndex.from_documents(FIXTURE_DOCS, ChunkPolicy(20, 5))
    return list(corpus.chunks())


@pytest.mark.acceptance("SQuAD validator: 100% answer offsets sound on fixture corpus + example lexicon; deterministic build")
def test_squad_validator_and_determinism(tmp_path):
    chunks = fixture_chunks()
    squad = build_squad(chunks, FIXTURE_QUERIES, ACCEPTANCE_LEXICON)
    assert squad.triplets
    # independent offset check, not via the packaged validator
    checked = 0
    for triplet in squad.triplets:
        assert triplet.answers
        for text, start in triplet.answers:
            checked += 1
            assert triplet.context[start : start + len(text)] == text
    assert checked > 0
    # the packaged validator agrees
    report = validate_squad(squad)
    assert report.ok and report.total == checked

    digests = []
    for name in ("one.json", "two.json"):
        out = tmp_path / name
        build_squad(fixture_chunks(), FIXTURE_QUERIES, ACCEPTANCE_LEXICON).write(out)
        digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


@pytest.mark.acceptance("MRPC validator: pair soundness, negatives within +/-1 of neg_ratio per triplet, seed-identical bytes")
def test_mrpc_validator_and_determinism(tmp_path):
    squad = build_squad(fixture_chunks(), FIXTURE_QUERIES, ACCEPTANCE_LEXICON)
    neg_ratio = 1.0
    mrpc = build_mrpc(squad, seed=13, neg_ratio=neg_ratio)
    assert mrpc.pairs

    answers_by_question = {}
    constituents_by_question = {}
    context_by_triplet = {t.id: t.context for t in squad.triplets}
    for triplet in squad.triplets:
        texts = answers_by_question.setdefault(triplet.question, [])
        parts = constituents_by_question.setdefault(triplet.question, set())
        for answer_text, _ in triplet.answers:
            texts.append(answer_text)
            parts.update(s.text for s in split_sentences(answer_text))

    pos_by_origin = {}
    neg_by_origin = {}
    for pair, origin in zip(mrpc.pairs, mrpc.origins):
        if pair.label == 1:
            pos_by_origin[origin] = pos_by_origin.get(origin, 0) + 1
            assert pair.sentence_b in constituents_by_question[pair.sentence_a]
        else:
            assert pair.label == 0
            neg_by_origin[origin] = neg_by_origin.get(origin, 0) + 1
            assert pair.sentence_b in context_by_triplet[origin]
            for answer_text in answers_by_question[pair.sentence_a]:
                assert pair.sentence_b not in answer_text

    for origin, positives in pos_by_origin.items():
        negatives = neg_by_origin.get(origin, 0)
        assert negatives <= neg_ratio * positives + 1
    # packaged validator re-checks both soundness and the two-sided
    # (candidate-pool-aware) ratio bound
    from cov19ir.traindata import validate_mrpc

    assert validate_mrpc(mrpc, squad, neg_ratio).ok

    digests = []
    for name in ("a.tsv", "b.tsv"):
        out = tmp_path / name
        build_mrpc(squad, seed=13, neg_ratio=neg_ratio).write(out)
        digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


@pytest.mark.acceptance("Unseen-query rewriting: cutoff 0.75 rewrites via sim 0.82 stub, cutoff 0.85 does not")
def test_unseen_query_rewriting():
    stub = TableEmbedding({("makeup", "structure"): 0.82})
    rewritten = rewrite_unseen_query(
        "makeup of the virus", ACCEPTANCE_LEXICON, stub, cutoff=0.75
    )
    assert rewritten.rewritten_query == "structure of the virus"
    assert rewritten.substitutions == (("makeup", "structure", 0.82),)

    untouched = rewrite_unseen_query(
        "makeup of the virus", ACCEPTANCE_LEXICON, stub, cutoff=0.85
    )
    assert untouched.rewritten_query == "makeup of the virus"
    assert untouched.substitutions == ()

    for result in (rewritten, untouched):
        assert list(result.matched_keywords) == extract_keywords(
            result.rewritten_query, ACCEPTANCE_LEXICON
        )


@pytest.mark.acceptance("Determinism under parallelism: retrieve and answer bit-identical with 1 vs 8 workers")
def test_parallel_determinism():
    rng = random.Random(31337)
    corpus = synthetic_corpus(rng, 40, 20, 120, VOCAB, ChunkPolicy(16, 4))
    query = "fever cough virus"

    retrieved = {}
    answered = {}
    for workers in (1, 8):
        ranked = retrieve(query, corpus, EXTRACTOR, SCORER, k=40, workers=workers)
        retrieved[workers] = json.dumps([asdict(d) for d in ranked]).encode()
        answered[workers] = json.dumps(asdict(answer(query, corpus, EXTRACTOR, workers=workers))).encode()
    assert retrieved[1] == retrieved[8]
    assert answered[1] == answered[8]
