"""Deterministic rule-based sentence splitting with exact offsets.

A boundary is a '.', '?' or '!' that is followed by whitespace and an
uppercase letter, or by end of text. A '.' is not a boundary when it
terminates a protected abbreviation ("Fig.", "et al.", ...).
"""

from __future__ import annotations

from dataclasses import dataclass

TERMINATORS = ".?!"

# Lowercase abbreviation forms; the period that follows them never splits.
DEFAULT_ABBREVIATIONS: tuple[str, ...] = ("fig", "et al", "e.g", "i.e", "vs", "spp", "no")


@dataclass(frozen=True)
class Sentence:
    """A sentence with offsets into the text it came from."""

    text: str
    start_char: int
    end_char: int


def _ends_abbreviation(text: str, dot_index: int, abbreviations: tuple[str, ...]) -> bool:
    head = text[:dot_index].lower()
    for abbr in abbreviations:
        if not head.endswith(abbr):
            continue
        before = dot_index - len(abbr) - 1
        if before < 0 or not text[before].isalnum():
            return True
    return False


def _boundaries(text: str, abbreviations: tuple[str, ...]) -> list[int]:
    out = []
    n = len(text)
    for i, ch in enumerate(text):
        if ch not in TERMINATORS:
            continue
        j = i + 1
        while j < n and text[j].isspace():
            j += 1
        if j < n:
            if j == i + 1:  # no whitespace after the terminator
                continue
            if not text[j].isupper():
                continue
        if ch == "." and _ends_abbreviation(text, i, abbreviations):
            continue
        out.append(i)
    return out


def split_sentences(
    text: str, abbreviations: tuple[str, ...] = DEFAULT_ABBREVIATIONS
) -> list[Sentence]:
    """Split ``text`` into sentences; offsets satisfy text[start:end] == sentence."""
    sentences: list[Sentence] = []
    prev = 0
    for b in _boundaries(text, abbreviations):
        start = prev
        while start <= b and text[start].isspace():
            start += 1
        end = b + 1
        if start < end:
            sentences.append(Sentence(text[start:end], start, end))
        prev = end
    # Trailing text without a terminator forms the last sentence.
    tail = text[prev:]
    if tail.strip():
        start = prev
        while text[start].isspace():
            start += 1
        end = len(text)
        while text[end - 1].isspace():
            end -= 1
        sentences.append(Sentence(text[start:end], start, end))
    return sentences
