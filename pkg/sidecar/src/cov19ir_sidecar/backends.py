"""Model backends for the inference endpoints.

Two families: transformer checkpoints (extractive-QA and sequence
classification heads) and deterministic lexical stand-ins that need no
model files. Both return character offsets that reproduce the span text
from the context exactly, and scores in [0, 1].
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_SENTENCE_RE = re.compile(r"[^.?!]+[.?!]*")
_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class SpanPrediction:
    text: str
    start: int
    end: int
    score: float
    truncated: bool = False


def _token_set(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(text.lower()))


class LexicalSpanModel:
    """Zero-dependency span backend: best token-overlap sentence."""

    name = "lexical"

    def predict(self, query: str, context: str) -> SpanPrediction:
        query_tokens = _token_set(query)
        denom = max(1, len(query_tokens))
        best: SpanPrediction | None = None
        for match in _SENTENCE_RE.finditer(context):
            start, end = match.start(), match.end()
            while start < end and context[start].isspace():
                start += 1
            while end > start and context[end - 1].isspace():
                end -= 1
            if start >= end:
                continue
            sentence = context[start:end]
            score = len(query_tokens & _token_set(sentence)) / denom
            if best is None or score > best.score:
                best = SpanPrediction(sentence, start, end, score)
        if best is None or best.score == 0.0:
            return SpanPrediction("", 0, 0, 0.0)
        return best


class LexicalParaphraseModel:
    """Zero-dependency equivalence backend: token-set Jaccard."""

    name = "lexical"

    def predict(self, text_a: str, text_b: str) -> float:
        tokens_a = _token_set(text_a)
        tokens_b = _token_set(text_b)
        if not tokens_a and not tokens_b:
            return 1.0
        if not tokens_a or not tokens_b:
            return 0.0
        return len(tokens_a & tokens_b) / len(tokens_a | tokens_b)


def _model_max_length(tokenizer, config) -> int:
    limit = getattr(tokenizer, "model_max_length", None) or 512
    if limit > 100_000:  # unset sentinel
        limit = 512
    positions = getattr(config, "max_position_embeddings", None)
    if positions:
        limit = min(limit, positions)
    return limit


class TransformersSpanModel:
    """Extractive-QA checkpoint behind the span endpoint.

    The span score is the product of the softmax-normalized start and end
    position probabilities of the chosen span; offsets come from the fast
    tokenizer's offset mapping, so they index the original context string.
    Contexts longer than the model window are truncated and flagged.
    """

    def __init__(self, model_path: str, max_answer_tokens: int = 64) -> None:
        import torch
        from transformers import AutoModelForQuestionAnswering, AutoTokenizer

        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_path, use_fast=True)
        self.model = AutoModelForQuestionAnswering.from_pretrained(model_path)
        self.model.eval()
        self.max_answer_tokens = max_answer_tokens
        self.max_length = _model_max_length(self.tokenizer, self.model.config)
        self.name = str(model_path)

    def predict(self, query: str, context: str) -> SpanPrediction:
        torch = self._torch
        encoded = self.tokenizer(
            query,
            context,
            return_tensors="pt",
            truncation="only_second",
            max_length=self.max_length,
            return_offsets_mapping=True,
        )
        offsets = encoded.pop("offset_mapping")[0].tolist()
        sequence_ids = encoded.sequence_ids(0)
        context_mask = torch.tensor(
            [1.0 if s == 1 else 0.0 for s in sequence_ids]
        )
        last_context_end = max(
            (offsets[i][1] for i, s in enumerate(sequence_ids) if s == 1), default=0
        )
        truncated = last_context_end < len(context.rstrip())

        with torch.no_grad():
            output = self.model(**encoded)
        start_probs = torch.softmax(output.start_logits[0], dim=-1) * context_mask
        end_probs = torch.softmax(output.end_logits[0], dim=-1) * context_mask

        # joint start x end grid, keeping start <= end < start + max span length
        grid = start_probs.unsqueeze(1) * end_probs.unsqueeze(0)
        grid = torch.triu(grid)
        grid = torch.tril(grid, diagonal=self.max_answer_tokens - 1)
        flat_index = int(torch.argmax(grid))
        size = grid.shape[0]
        start_token, end_token = divmod(flat_index, size)
        score = float(grid[start_token, end_token])
        if score <= 0.0:
            return SpanPrediction("", 0, 0, 0.0, truncated)
        start_char = offsets[start_token][0]
        end_char = offsets[end_token][1]
        if start_char >= end_char:
            return SpanPrediction("", 0, 0, 0.0, truncated)
        return SpanPrediction(
            context[start_char:end_char], start_char, end_char, min(1.0, score), truncated
        )


class TransformersParaphraseModel:
    """Sentence-pair classification checkpoint behind the equivalence endpoint.

    Returns the positive-class probability: softmax over two or more
    labels (positive index configurable), sigmoid for single-logit heads.
    """

    def __init__(self, model_path: str, positive_label: int = 1) -> None:
        import torch
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_path, use_fast=True)
        self.model = AutoModelForSequenceClassification.from_pretrained(model_path)
        self.model.eval()
        self.positive_label = positive_label
        self.max_length = _model_max_length(self.tokenizer, self.model.config)
        self.name = str(model_path)

    def predict(self, text_a: str, text_b: str) -> float:
        torch = self._torch
        encoded = self.tokenizer(
            text_a,
            text_b,
            return_tensors="pt",
            truncation=True,
            max_length=self.max_length,
        )
        with torch.no_grad():
            logits = self.model(**encoded).logits[0]
        if logits.numel() == 1:
            return float(torch.sigmoid(logits[0]))
        probs = torch.softmax(logits, dim=-1)
        return float(probs[self.positive_label])


def load_span_model(spec: str):
    """'lexical' or a checkpoint path/name."""
    if spec == "lexical":
        return LexicalSpanModel()
    return TransformersSpanModel(spec)


def load_paraphrase_model(spec: str):
    if spec == "lexical":
        return LexicalParaphraseModel()
    return TransformersParaphraseModel(spec)
