"""Deterministic lexical clue encoder.

Clues are mapped to L2-normalized TF-IDF vectors over character
3-grams of the folded text.  Vectors are sparse dicts, which keeps
cosine search exact at the corpus sizes this engine targets.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..text import strip_diacritics

_CLEAN_RE = re.compile(r"[^a-z0-9]+")


def clean_text(text: str) -> str:
    folded = _CLEAN_RE.sub(" ", strip_diacritics(text).casefold()).strip()
    return f" {folded} " if folded else ""


def trigrams(text: str) -> dict[str, int]:
    """Character 3-gram counts of the cleaned text (space-padded)."""
    cleaned = clean_text(text)
    counts: dict[str, int] = {}
    if not cleaned:
        return counts
    if len(cleaned) < 3:
        counts[cleaned] = 1
        return counts
    for i in range(len(cleaned) - 2):
        gram = cleaned[i : i + 3]
        counts[gram] = counts.get(gram, 0) + 1
    return counts


Vector = dict[str, float]


def _l2_normalize(vec: Vector) -> Vector:
    norm = math.sqrt(sum(w * w for w in vec.values()))
    if norm == 0.0:
        return {}
    return {g: w / norm for g, w in vec.items()}


def cosine(a: Vector, b: Vector) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(w * b[g] for g, w in a.items() if g in b)


@dataclass(frozen=True)
class TrigramEncoder:
    """Encoder with an optional fitted IDF table.

    Unfitted encoders weight grams by raw term frequency; fitted ones
    drop grams outside the fitted vocabulary, so encodings are
    deterministic given the index vocabulary.
    """

    idf: dict[str, float] | None = None

    @classmethod
    def fit(cls, corpus: list[str]) -> "TrigramEncoder":
        doc_freq: dict[str, int] = {}
        for text in corpus:
            for gram in trigrams(text):
                doc_freq[gram] = doc_freq.get(gram, 0) + 1
        n_docs = len(corpus)
        idf = {
            gram: math.log((1 + n_docs) / (1 + df)) + 1.0
            for gram, df in doc_freq.items()
        }
        return cls(idf)

    def encode(self, text: str) -> Vector:
        counts = trigrams(text)
        if self.idf is None:
            weighted = {g: float(n) for g, n in counts.items()}
        else:
            weighted = {
                g: n * self.idf[g] for g, n in counts.items() if g in self.idf
            }
        return _l2_normalize(weighted)


def default_encode(text: str) -> Vector:
    """Encode a clue without a fitted vocabulary (pure trigram TF)."""
    return TrigramEncoder().encode(text)
