"""Low-level token helpers shared by scoring, lexicon and traindata.

Tokens here are deliberately dumb: maximal non-whitespace runs for offset
work, lowercase alphanumeric runs for overlap scoring, and \\w+ runs for
whole-word lexicon matching. No linguistic tokenization at this layer.
"""

from __future__ import annotations

import re

WORD_RE = re.compile(r"\w+", re.UNICODE)
ALNUM_RE = re.compile(r"[a-z0-9]+")
NONSPACE_RE = re.compile(r"\S+")

# Small function-word list used to keep capitalized stopwords ("The", "What")
# out of proper-noun and entity candidates.
STOPWORDS = frozenset(
    """a an the and or but if then than is are was were be been being am
    do does did done have has had what which who whom whose where when why
    how can could should would may might will shall must not no nor any
    some all each other such own same so too very just in on at by for
    with about against between into through during before after above
    below of to from up down out off over under again further once this
    that these those it its itself there here""".split()
)


def word_tokens(text: str) -> list[str]:
    """All \\w+ runs of ``text``, lowercased."""
    return [m.group(0).lower() for m in WORD_RE.finditer(text)]


def word_token_spans(text: str) -> list[tuple[str, int, int]]:
    """(token, start, end) for each \\w+ run, token lowercased."""
    return [(m.group(0).lower(), m.start(), m.end()) for m in WORD_RE.finditer(text)]


def alnum_token_set(text: str) -> set[str]:
    """Unique lowercase alphanumeric-run tokens of ``text``."""
    return set(ALNUM_RE.findall(text.lower()))


def nonspace_spans(text: str) -> list[tuple[int, int]]:
    """(start, end) of each maximal non-whitespace run."""
    return [(m.start(), m.end()) for m in NONSPACE_RE.finditer(text)]


def strip_outer_punct(text: str, start: int, end: int) -> tuple[int, int]:
    """Shrink [start, end) to drop non-alphanumeric edge characters."""
    while start < end and not text[start].isalnum():
        start += 1
    while end > start and not text[end - 1].isalnum():
        end -= 1
    return start, end


def stripped_tokens(text: str) -> list[str]:
    """Whitespace tokens with surrounding punctuation removed; empties dropped."""
    out = []
    for start, end in nonspace_spans(text):
        s, e = strip_outer_punct(text, start, end)
        if s < e:
            out.append(text[s:e])
    return out


def is_capitalized(token: str) -> bool:
    """Initial uppercase letter followed by lowercase letters only."""
    return len(token) > 1 and token[0].isupper() and token[1:].islower()


def has_digit(token: str) -> bool:
    return any(c.isdigit() for c in token)


def has_internal_upper(token: str) -> bool:
    return any(c.isupper() for c in token[1:])


def is_all_caps(token: str) -> bool:
    return len(token) >= 2 and token.isupper()
