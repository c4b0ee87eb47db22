"""Rule-based expert for common French crossword word games.

Triggers are case/diacritic-insensitive substrings of the clue, shipped
as a ``marker<TAB>rule-kind`` data table so new markers need no code.
Sub-rules:

* closed lists on trigger tokens (Roman numerals, Greek letters,
  chemical symbols, cardinal-direction strings, number words, grammar
  words, French departments);
* tail/head extraction, e.g. ``a la sortie de X`` takes the last
  letters of X;
* reversal (``a l'envers``) of candidates found for the residual clue;
* vowel removal (``sans voyelle``) of candidates of any source length
  whose consonant skeleton has the requested length.

Reversal and vowel removal consult a delegate expert for the residual
clue (two-step clues), plus the closed-list rules applied internally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..text import fold_clue
from .base import CandidateList, Expert, expert_generate, list_from_scores
from .closed_lists import (
    cardinal_strings,
    chemical_symbols,
    departments,
    french_number_word,
    grammar_words,
    greek_letters,
    number_words_upto,
    roman_numerals_of_length,
)

VOWELS = "AEIOU"

CLOSED_KINDS = (
    "roman", "greek", "element", "cardinal", "number",
    "pronoun", "conjunction", "preposition", "department",
)
TRANSFORM_KINDS = ("tail", "head", "reverse", "devowel")

_DIGITS_RE = re.compile(r"\d+")
_LETTERS_RE = re.compile(r"[a-z]")
_PUNCT_RE = re.compile(r"[:;,.!?«»\"()]")

Marker = tuple[str, str]  # (folded marker text, rule kind)


def load_markers(path: Path | None = None) -> tuple[Marker, ...]:
    """Read the marker table; ``None`` loads the packaged defaults."""
    if path is None:
        text = resources.files("cruciver.data").joinpath("markers.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    markers = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        marker, _, kind = line.partition("\t")
        kind = kind.strip()
        if not marker or kind not in CLOSED_KINDS + TRANSFORM_KINDS:
            raise ValueError(f"marker table line {lineno}: bad entry {line!r}")
        markers.append((fold_clue(marker), kind))
    return tuple(markers)


def strip_vowels(word: str, vowels: str = VOWELS) -> str:
    return "".join(ch for ch in word if ch not in vowels)


def reverse_candidates(scores: dict[str, float]) -> dict[str, float]:
    """Reverse every answer; applying this twice is the identity."""
    out: dict[str, float] = {}
    for answer, mass in scores.items():
        reversed_answer = answer[::-1]
        out[reversed_answer] = out.get(reversed_answer, 0.0) + mass
    return out


def _letters_upper(folded: str) -> str:
    return "".join(_LETTERS_RE.findall(folded)).upper()


def _find_transform(folded: str, kind: str, markers: tuple[Marker, ...]):
    """Longest (then leftmost) marker of the kind present in the clue."""
    hits = []
    for marker, marker_kind in markers:
        if marker_kind != kind:
            continue
        idx = folded.find(marker)
        if idx >= 0:
            hits.append((len(marker), -idx, marker, idx))
    if not hits:
        return None
    hits.sort(reverse=True)
    _, _, marker, idx = hits[0]
    return marker, idx


def _strip_marker(folded: str, hit: tuple[str, int]) -> str:
    marker, idx = hit
    residual = folded[:idx] + " " + folded[idx + len(marker):]
    residual = _PUNCT_RE.sub(" ", residual)
    return " ".join(residual.split())


def _closed_members(kind: str, folded: str, length: int) -> tuple[str, ...]:
    if kind == "roman":
        return roman_numerals_of_length(length)
    if kind == "greek":
        return tuple(w for w in greek_letters() if len(w) == length)
    if kind == "element":
        return tuple(w for w in chemical_symbols() if len(w) == length)
    if kind == "cardinal":
        return cardinal_strings(length)
    if kind in ("pronoun", "conjunction", "preposition"):
        return tuple(w for w in grammar_words(kind) if len(w) == length)
    if kind == "number":
        digits = [int(d) for d in _DIGITS_RE.findall(folded) if int(d) <= 9999]
        if digits:
            words = {french_number_word(d) for d in digits}
        else:
            words = set(number_words_upto(100))
        return tuple(sorted(w for w in words if len(w) == length))
    if kind == "department":
        table = departments()
        digit_tokens = _DIGITS_RE.findall(folded)
        if digit_tokens:
            by_int = {key.lstrip("0") or "0": name for key, name in table.items()}
            names = {
                by_int[d.lstrip("0") or "0"]
                for d in digit_tokens
                if (d.lstrip("0") or "0") in by_int
            }
        else:
            names = set(table.values())
        return tuple(sorted(n for n in names if len(n) == length))
    raise ValueError(f"unknown closed-list kind {kind!r}")


def _base_scores(folded: str, length: int, markers: tuple[Marker, ...]) -> dict[str, float]:
    """Closed-list and extraction rules; each fired rule spends mass 1."""
    scores: dict[str, float] = {}
    fired = []
    for marker, kind in markers:
        if kind in CLOSED_KINDS and kind not in fired and marker in folded:
            fired.append(kind)
    for kind in CLOSED_KINDS:
        if kind not in fired:
            continue
        members = _closed_members(kind, folded, length)
        if not members:
            continue
        share = 1.0 / len(members)
        for member in members:
            scores[member] = scores.get(member, 0.0) + share
    for kind in ("tail", "head"):
        hit = _find_transform(folded, kind, markers)
        if hit is None:
            continue
        marker, idx = hit
        word = _letters_upper(folded[idx + len(marker):])
        if len(word) >= length:
            extract = word[-length:] if kind == "tail" else word[:length]
            scores[extract] = scores.get(extract, 0.0) + 1.0
    return scores


def _residual_sources(
    residual: str,
    length: int,
    delegate: Expert | None,
    markers: tuple[Marker, ...],
) -> dict[str, float]:
    """Candidates of the residual clue: internal rules plus the delegate."""
    sources = _base_scores(residual, length, markers)
    if delegate is not None and residual:
        delegated = expert_generate(delegate, residual, length)
        for cand in delegated.candidates:
            mass = cand.probability * delegated.confidence
            sources[cand.answer] = sources.get(cand.answer, 0.0) + mass
    return sources


def rulebased_generate(
    clue: str,
    length: int,
    delegate: Expert | None = None,
    markers: tuple[Marker, ...] | None = None,
    clue_id: str = "",
) -> CandidateList:
    """Union of all matching sub-rules, renormalized."""
    if markers is None:
        markers = load_markers()
    folded = fold_clue(clue)
    scores = _base_scores(folded, length, markers)

    reverse_hit = _find_transform(folded, "reverse", markers)
    if reverse_hit is not None:
        residual = _strip_marker(folded, reverse_hit)
        sources = _residual_sources(residual, length, delegate, markers)
        for answer, mass in reverse_candidates(sources).items():
            scores[answer] = scores.get(answer, 0.0) + mass

    devowel_hit = _find_transform(folded, "devowel", markers)
    if devowel_hit is not None:
        residual = _strip_marker(folded, devowel_hit)
        # Source words are longer than the target by their vowel count.
        for source_length in range(length, min(2 * length + 5, 26)):
            sources = _residual_sources(residual, source_length, delegate, markers)
            for answer, mass in sources.items():
                skeleton = strip_vowels(answer)
                if len(skeleton) == length:
                    scores[skeleton] = scores.get(skeleton, 0.0) + mass

    return list_from_scores(scores, "rulebased", clue_id)


@dataclass
class RuleBasedExpert:
    markers: tuple[Marker, ...]
    delegate: Expert | None = None
    expert_id: str = "rulebased"

    @classmethod
    def with_default_markers(cls, delegate: Expert | None = None) -> "RuleBasedExpert":
        return cls(load_markers(), delegate)

    def generate(self, clue: str, length: int) -> CandidateList:
        return rulebased_generate(clue, length, self.delegate, self.markers)
