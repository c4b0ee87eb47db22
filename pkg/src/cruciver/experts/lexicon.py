"""Frequency-weighted word list with wildcard pattern lookup.

Patterns are strings over A-Z plus ``?`` for an unconstrained cell;
this is what the network fallback and the implicit fill module query.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..text import ALPHABET, normalize_answer, UnrepresentableError
from .base import CandidateList, list_from_scores

log = logging.getLogger("cruciver.experts")

WILDCARD = "?"


class PatternError(ValueError):
    """Pattern contains characters outside A-Z and ``?``."""


def pattern_matches(pattern: str, word: str) -> bool:
    if len(pattern) != len(word):
        return False
    return all(p == WILDCARD or p == w for p, w in zip(pattern, word))


def check_pattern(pattern: str) -> str:
    if not pattern or any(ch != WILDCARD and ch not in ALPHABET for ch in pattern):
        raise PatternError(f"bad pattern {pattern!r}")
    return pattern


@dataclass
class Lexicon:
    """Words with frequencies, indexed by length."""

    frequencies: dict[str, int] = field(default_factory=dict)
    _by_length: dict[int, list[str]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for word in self.frequencies:
            self._by_length.setdefault(len(word), []).append(word)
        for words in self._by_length.values():
            words.sort()

    @classmethod
    def from_pairs(cls, pairs) -> "Lexicon":
        frequencies: dict[str, int] = {}
        for word, freq in pairs:
            frequencies[word] = frequencies.get(word, 0) + freq
        return cls(frequencies)

    def match(self, pattern: str) -> list[tuple[str, int]]:
        """All (word, frequency) matching the pattern, alphabetical."""
        check_pattern(pattern)
        words = self._by_length.get(len(pattern), ())
        return [
            (word, self.frequencies[word])
            for word in words
            if pattern_matches(pattern, word)
        ]

    def __len__(self) -> int:
        return len(self.frequencies)


def load_lexicon(path) -> Lexicon:
    """Load ``word<TAB>frequency`` lines; malformed lines warn and skip."""
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                log.warning("%s:%d: expected word<TAB>frequency; skipped", path, lineno)
                continue
            try:
                pairs.append((normalize_answer(fields[0]), int(fields[1])))
            except (ValueError, UnrepresentableError) as exc:
                log.warning("%s:%d: %s; skipped", path, lineno, exc)
    return Lexicon.from_pairs(pairs)


def lexicon_generate(pattern: str, lexicon: Lexicon, clue_id: str = "") -> CandidateList:
    """Matching words weighted by frequency."""
    scores = {word: float(freq) for word, freq in lexicon.match(pattern)}
    return list_from_scores(scores, "lexicon", clue_id)


@dataclass
class LexiconExpert:
    """Length-only prior over the lexicon (clue text is ignored)."""

    lexicon: Lexicon
    expert_id: str = "lexicon"

    def generate(self, clue: str, length: int) -> CandidateList:
        return lexicon_generate(WILDCARD * length, self.lexicon)
