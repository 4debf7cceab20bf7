"""Inference sidecar hosting span-extraction and sentence-pair
equivalence models behind a small JSON wire protocol."""

__version__ = "0.1.0"

from .app import create_app
from .backends import (
    LexicalParaphraseModel,
    LexicalSpanModel,
    SpanPrediction,
    load_paraphrase_model,
    load_span_model,
)
