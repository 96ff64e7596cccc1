"""Token overlap helpers shared by alignment, localization, and page resolution."""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# attribute values that carry human-readable intent
TEXTUAL_ATTRIBUTES = ("aria-label", "title", "name", "placeholder", "alt", "value")


def tokens(text: str | None) -> frozenset[str]:
    """Lowercased alphanumeric token set of a string."""
    if not text:
        return frozenset()
    return frozenset(_TOKEN_RE.findall(text.lower()))


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a or not b:
        return 0.0
    inter = len(a & b)
    if inter == 0:
        return 0.0
    return inter / len(a | b)


def candidate_texts(text: str, attributes: dict[str, str]) -> list[str]:
    """The strings a candidate exposes for semantic matching."""
    out = [text] if text else []
    for key in TEXTUAL_ATTRIBUTES:
        v = attributes.get(key)
        if v:
            out.append(v)
    return out


def best_text_similarity(needle: str | None, text: str, attributes: dict[str, str]) -> float:
    """Max token Jaccard between a needle and any of a candidate's strings."""
    needle_tokens = tokens(needle)
    if not needle_tokens:
        return 0.0
    best = 0.0
    for s in candidate_texts(text, attributes):
        best = max(best, jaccard(needle_tokens, tokens(s)))
    return best
