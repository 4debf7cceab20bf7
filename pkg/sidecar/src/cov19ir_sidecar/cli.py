"""Serve the inference endpoints."""

from __future__ import annotations

import argparse
import os
import sys

from .app import create_app


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cov19ir-sidecar",
        description="Span extraction and sentence-pair equivalence inference service.",
    )
    parser.add_argument(
        "--span-model",
        default="lexical",
        help="checkpoint path/name for the span model, or 'lexical'",
    )
    parser.add_argument(
        "--paraphrase-model",
        default="lexical",
        help="checkpoint path/name for the equivalence model, or 'lexical'",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get("COV19IR_SIDECAR_PORT", "8001")),
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    import uvicorn

    args = build_parser().parse_args(argv)
    app = create_app(args.span_model, args.paraphrase_model)
    if not app.state.models.ready:
        print(f"error: {app.state.models.failure}", file=sys.stderr)
        return 1
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
