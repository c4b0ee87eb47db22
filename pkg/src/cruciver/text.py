"""Text normalization for the canonical A-Z grid alphabet.

French answers are written in grids as unaccented capitals, so every
answer string in the engine goes through :func:`normalize_answer` exactly
once at the boundary.  Clue matching uses the gentler :func:`fold_clue`.
"""

from __future__ import annotations

import re
import unicodedata

ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
ALPHABET_SIZE = len(ALPHABET)
LETTER_INDEX = {c: i for i, c in enumerate(ALPHABET)}

# NFKD does not decompose these ligatures, expand them by hand.
_LIGATURES = {"Œ": "OE", "œ": "oe", "Æ": "AE", "æ": "ae"}

_APOSTROPHES = "'’ʼ"
_HYPHENS = "-‐‑–—"

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class UnrepresentableError(ValueError):
    """Text cannot be reduced to the A-Z alphabet."""


def strip_diacritics(text: str) -> str:
    """Replace accented letters by their base letter and expand ligatures."""
    for ligature, expansion in _LIGATURES.items():
        if ligature in text:
            text = text.replace(ligature, expansion)
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def normalize_answer(raw: str) -> str:
    """Canonicalize an answer for the grid.

    Upper-cases, strips diacritics (É→E, Ç→C, Œ→OE, Æ→AE) and removes
    spaces, hyphens and apostrophes.  Raises :class:`UnrepresentableError`
    if anything outside A-Z survives.  Idempotent.
    """
    letters = []
    for ch in strip_diacritics(raw):
        if ch.isspace() or ch in _APOSTROPHES or ch in _HYPHENS:
            continue
        upper = ch.upper()
        if len(upper) != 1 or not ("A" <= upper <= "Z"):
            raise UnrepresentableError(
                f"unrepresentable character {ch!r} in {raw!r}"
            )
        letters.append(upper)
    return "".join(letters)


def fold_clue(text: str) -> str:
    """Case/diacritic-insensitive form of a clue for matching.

    Apostrophe variants collapse to ``'`` and whitespace runs to a single
    space; other punctuation is preserved.
    """
    folded = strip_diacritics(text).casefold()
    for apo in _APOSTROPHES[1:]:
        folded = folded.replace(apo, "'")
    return " ".join(folded.split())


def clue_tokens(text: str) -> tuple[str, ...]:
    """Alphanumeric tokens of the folded clue, in order."""
    return tuple(_TOKEN_RE.findall(fold_clue(text).replace("'", " ")))
