"""Command-line interface.

Subcommands: ingest, retrieve, answer, build-squad, build-mrpc, serve.
retrieve/answer run the exact pipeline the HTTP service runs, so both
surfaces return identical rankings for identical configuration.

Exit codes: 0 success, 2 input/config error, 3 transport/remote error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .config import Config, apply_env, load_config
from .corpus import load_corpus, write_chunk_index
from .errors import (
    ConfigError,
    Cov19IrError,
    EmptyCorpus,
    EmptySquad,
    MalformedAnnotations,
    MalformedLexicon,
    MalformedRecord,
    NoTriplets,
    ScorerError,
)
from .lexicon import load_lexicon
from .service import PipelineState, create_app, run_answer, run_retrieve
from .traindata import (
    annotations_recognizer,
    build_mrpc,
    build_squad,
    load_squad,
    recognize_entities,
    validate_mrpc,
    validate_squad,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TRANSPORT = 3


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--index", help="chunk index file or record directory")
    parser.add_argument("--scorer", choices=("lexical", "remote"))
    parser.add_argument("--endpoint", help="remote scorer base URL")
    parser.add_argument("--k", type=int, dest="top_k")
    parser.add_argument("--pn-weight", type=float, dest="pn_weight")
    parser.add_argument("--cutoff", type=float)
    parser.add_argument("--max-tokens", type=int, dest="max_tokens")
    parser.add_argument("--overlap", type=int, dest="overlap_tokens")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--timeout", type=float)
    parser.add_argument("--retries", type=int)
    parser.add_argument("--embeddings", help="word vectors in text format")
    parser.add_argument("--lexicon", help="lexicon JSON (enables query rewriting)")


def _resolve_config(args: argparse.Namespace) -> Config:
    config = load_config(args.config) if args.config else Config()
    overrides = {
        name: getattr(args, name)
        for name in (
            "index",
            "scorer",
            "endpoint",
            "top_k",
            "pn_weight",
            "cutoff",
            "max_tokens",
            "overlap_tokens",
            "workers",
            "timeout",
            "retries",
            "embeddings",
            "lexicon",
        )
        if getattr(args, name, None) is not None
    }
    if overrides:
        config = replace(config, **overrides)
    return apply_env(config).validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cov19ir",
        description="Literature retrieval and extractive question answering.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="parse records and write a chunk index")
    ingest.add_argument("--corpus", required=True, help="directory of article records")
    ingest.add_argument("--out", required=True, help="output chunk index path")
    ingest.add_argument("--max-tokens", type=int, default=128, dest="max_tokens")
    ingest.add_argument("--overlap", type=int, default=32, dest="overlap_tokens")

    retrieve = sub.add_parser("retrieve", help="rank documents for a query")
    retrieve.add_argument("--query", required=True)
    retrieve.add_argument("--pretty", action="store_true", help="human-readable table")
    _add_config_flags(retrieve)

    answer = sub.add_parser("answer", help="best answer span for a query")
    answer.add_argument("--query", required=True)
    answer.add_argument("--pretty", action="store_true")
    _add_config_flags(answer)

    squad = sub.add_parser("build-squad", help="generate an extractive-QA trainfile")
    squad.add_argument("--index", required=True, help="chunk index file or record directory")
    squad.add_argument("--queries", required=True, help="one query per line")
    squad.add_argument("--lexicon", required=True, help="lexicon JSON file")
    squad.add_argument("--out", required=True)
    squad.add_argument("--annotations", help="external entity annotations (JSONL)")
    squad.add_argument("--max-tokens", type=int, default=128, dest="max_tokens")
    squad.add_argument("--overlap", type=int, default=32, dest="overlap_tokens")

    mrpc = sub.add_parser("build-mrpc", help="generate a sentence-pair trainfile")
    mrpc.add_argument("--squad", required=True, help="source trainfile (JSON)")
    mrpc.add_argument("--out", required=True)
    mrpc.add_argument("--seed", type=int, default=13)
    mrpc.add_argument("--neg-ratio", type=float, default=1.0, dest="neg_ratio")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    _add_config_flags(serve)

    return parser


def _cmd_ingest(args: argparse.Namespace) -> int:
    from .corpus import ChunkPolicy

    policy = ChunkPolicy(args.max_tokens, args.overlap_tokens)
    index = load_corpus(args.corpus, policy)
    chunks = write_chunk_index(index, args.out)
    print(f"{len(index)} documents, {chunks} chunks, {len(index.skipped)} skipped")
    for reason in index.skipped:
        print(f"skipped: {reason}", file=sys.stderr)
    return EXIT_OK


def _make_state(args: argparse.Namespace) -> PipelineState:
    config = _resolve_config(args)
    if not config.index:
        raise ConfigError("an index is required (--index or config file)")
    state = PipelineState(config)
    state.load()
    return state


class _FailureLog:
    """Collects per-chunk scorer failures; total failure aborts the command."""

    def __init__(self) -> None:
        self.failures: list[tuple[str, int, Exception]] = []

    def __call__(self, chunk, exc) -> None:
        self.failures.append((chunk.doc_id, chunk.chunk_index, exc))

    def check(self, total_chunks: int) -> None:
        if self.failures and len(self.failures) >= total_chunks:
            raise self.failures[-1][2]
        for doc_id, chunk_index, exc in self.failures:
            print(f"warning: chunk ({doc_id}, {chunk_index}) scored 0: {exc}", file=sys.stderr)


def _cmd_retrieve(args: argparse.Namespace) -> int:
    state = _make_state(args)
    failures = _FailureLog()
    hits = run_retrieve(state, args.query, on_error=failures)
    failures.check(state.index.chunk_count)
    if args.pretty:
        print(f"{'rank':>4}  {'score':>8}  {'doc_id':<24}  excerpt")
        for hit in hits:
            excerpt = hit.excerpt.replace("\n", " ")
            print(f"{hit.rank:>4}  {hit.score:>8.4f}  {hit.doc_id:<24}  {excerpt}")
    else:
        for hit in hits:
            print(json.dumps(hit.model_dump(), ensure_ascii=False))
    return EXIT_OK


def _cmd_answer(args: argparse.Namespace) -> int:
    state = _make_state(args)
    failures = _FailureLog()
    result = run_answer(state, args.query, on_error=failures)
    failures.check(state.index.chunk_count)
    if args.pretty:
        print(f"doc_id      : {result.doc_id}")
        print(f"chunk_index : {result.chunk_index}")
        print(f"score       : {result.score:.4f}")
        print(f"answer      : {result.answer}")
    else:
        print(json.dumps(result.model_dump(), ensure_ascii=False))
    return EXIT_OK


def _cmd_build_squad(args: argparse.Namespace) -> int:
    from .corpus import ChunkPolicy

    policy = ChunkPolicy(args.max_tokens, args.overlap_tokens)
    index = load_corpus(args.index, policy)
    queries = [
        line.strip()
        for line in open(args.queries, encoding="utf-8")
        if line.strip()
    ]
    if not queries:
        raise NoTriplets(f"no queries in {args.queries}")
    lex = load_lexicon(args.lexicon)
    recognizer = (
        annotations_recognizer(args.annotations) if args.annotations else recognize_entities
    )
    squad = build_squad(list(index.chunks()), queries, lex, recognizer)
    report = validate_squad(squad)
    if not report.ok:
        for violation in report.violations:
            print(f"validation: {violation}", file=sys.stderr)
        print("trainfile failed validation; nothing written", file=sys.stderr)
        return EXIT_INPUT
    squad.write(args.out)
    print(
        f"{len(squad.triplets)} triplets, {report.total} answers, "
        f"100% offset-sound -> {args.out}"
    )
    return EXIT_OK


def _cmd_build_mrpc(args: argparse.Namespace) -> int:
    squad = load_squad(args.squad)
    mrpc = build_mrpc(squad, seed=args.seed, neg_ratio=args.neg_ratio)
    report = validate_mrpc(mrpc, squad, args.neg_ratio)
    if not report.ok:
        for violation in report.violations:
            print(f"validation: {violation}", file=sys.stderr)
        print("pair file failed validation; nothing written", file=sys.stderr)
        return EXIT_INPUT
    mrpc.write(args.out)
    positives = sum(1 for p in mrpc.pairs if p.label == 1)
    print(
        f"{len(mrpc.pairs)} pairs ({positives} positive, "
        f"{len(mrpc.pairs) - positives} negative) -> {args.out}"
    )
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    app = create_app(_resolve_config(args))
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "retrieve": _cmd_retrieve,
    "answer": _cmd_answer,
    "build-squad": _cmd_build_squad,
    "build-mrpc": _cmd_build_mrpc,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ScorerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except (
        ConfigError,
        EmptyCorpus,
        NoTriplets,
        EmptySquad,
        MalformedLexicon,
        MalformedRecord,
        MalformedAnnotations,
        Cov19IrError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
