"""Closed word lists backing the rule-based expert.

Roman numerals, cardinal-direction strings and French number words are
generated; Greek letters, chemical symbols, grammar words and French
departments ship as data files next to the marker table.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from itertools import product

CARDINAL_LETTERS = "ENOS"  # Est, Nord, Ouest, Sud
MAX_CARDINAL_LENGTH = 6

_ROMAN_DIGITS = (
    (1000, "M"), (900, "CM"), (500, "D"), (400, "CD"),
    (100, "C"), (90, "XC"), (50, "L"), (40, "XL"),
    (10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I"),
)


def to_roman(n: int) -> str:
    if not 1 <= n <= 3999:
        raise ValueError(f"roman numerals cover 1..3999, got {n}")
    out = []
    for value, digit in _ROMAN_DIGITS:
        while n >= value:
            out.append(digit)
            n -= value
    return "".join(out)


@lru_cache(maxsize=None)
def roman_numerals_of_length(length: int) -> tuple[str, ...]:
    return tuple(
        sorted({to_roman(n) for n in range(1, 4000) if len(to_roman(n)) == length})
    )


@lru_cache(maxsize=None)
def cardinal_strings(length: int) -> tuple[str, ...]:
    """All direction strings, e.g. ESE; capped to keep enumeration small."""
    if not 1 <= length <= MAX_CARDINAL_LENGTH:
        return ()
    return tuple(
        "".join(combo) for combo in product(sorted(CARDINAL_LETTERS), repeat=length)
    )


_UNITS = (
    "ZERO", "UN", "DEUX", "TROIS", "QUATRE", "CINQ", "SIX", "SEPT", "HUIT",
    "NEUF", "DIX", "ONZE", "DOUZE", "TREIZE", "QUATORZE", "QUINZE", "SEIZE",
)
_TENS = {20: "VINGT", 30: "TRENTE", 40: "QUARANTE", 50: "CINQUANTE", 60: "SOIXANTE"}


def _under_hundred(n: int) -> str:
    if n < 17:
        return _UNITS[n]
    if n < 20:
        return "DIX" + _UNITS[n - 10]
    if n < 70:
        tens, unit = divmod(n, 10)
        stem = _TENS[tens * 10]
        if unit == 0:
            return stem
        if unit == 1:
            return stem + "ET" + "UN"
        return stem + _UNITS[unit]
    if n < 80:
        if n == 71:
            return "SOIXANTEETONZE"
        return "SOIXANTE" + _under_hundred(n - 60)
    if n == 80:
        return "QUATREVINGTS"
    return "QUATREVINGT" + _under_hundred(n - 80)


def french_number_word(n: int) -> str:
    """Spell a number 0..9999 the way grids write it (no spaces/hyphens)."""
    if not 0 <= n <= 9999:
        raise ValueError(f"number words cover 0..9999, got {n}")
    if n < 100:
        return _under_hundred(n)
    if n < 1000:
        hundreds, rest = divmod(n, 100)
        head = "CENT" if hundreds == 1 else _UNITS[hundreds] + "CENT"
        if rest == 0:
            return head + ("S" if hundreds > 1 else "")
        return head + french_number_word(rest)
    thousands, rest = divmod(n, 1000)
    head = "MILLE" if thousands == 1 else _UNITS[thousands] + "MILLE"
    if rest == 0:
        return head
    return head + french_number_word(rest)


@lru_cache(maxsize=None)
def number_words_upto(limit: int = 100) -> tuple[str, ...]:
    return tuple(sorted({french_number_word(n) for n in range(0, limit + 1)}))


def _read_lines(name: str) -> tuple[str, ...]:
    text = resources.files("cruciver.data").joinpath(name).read_text("utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=None)
def greek_letters() -> tuple[str, ...]:
    return _read_lines("greek.txt")


@lru_cache(maxsize=None)
def chemical_symbols() -> tuple[str, ...]:
    return _read_lines("elements.txt")


@lru_cache(maxsize=None)
def grammar_words(kind: str) -> tuple[str, ...]:
    filenames = {
        "pronoun": "pronouns.txt",
        "conjunction": "conjunctions.txt",
        "preposition": "prepositions.txt",
    }
    return _read_lines(filenames[kind])


@lru_cache(maxsize=None)
def departments() -> dict[str, str]:
    """Department number -> normalized name."""
    table = {}
    for line in _read_lines("departments.tsv"):
        number, _, name = line.partition("\t")
        table[number] = name
    return table
