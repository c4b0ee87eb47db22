"""Web-search candidate generator over a pluggable snippet backend.

The core never talks to a live search engine: backends implement
``query(text, max_results) -> snippets`` and the bundled backend reads
canned snippets from a directory, one file per query keyed by the
SHA-256 of the query text.  Candidates are snippet tokens (and
concatenations of up to three adjacent tokens) of the requested length,
weighted by occurrence count times the reciprocal snippet rank.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from ..text import normalize_answer, UnrepresentableError
from .base import CandidateList, empty_list, list_from_scores

log = logging.getLogger("cruciver.experts")

MAX_NGRAM = 3
_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


class SearchBackend(Protocol):
    def query(self, text: str, max_results: int) -> list[str]: ...


def query_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class FixtureBackend:
    """Deterministic backend reading ``<sha256(query)>.txt`` snippet files."""

    directory: Path

    def __post_init__(self):
        self.directory = Path(self.directory)

    def path_for(self, text: str) -> Path:
        return self.directory / f"{query_digest(text)}.txt"

    def query(self, text: str, max_results: int) -> list[str]:
        path = self.path_for(text)
        if not path.exists():
            return []
        with open(path, encoding="utf-8") as handle:
            snippets = [line.strip() for line in handle if line.strip()]
        return snippets[:max_results]

    @staticmethod
    def write_fixture(directory: Path, text: str, snippets: list[str]) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{query_digest(text)}.txt"
        path.write_text("\n".join(snippets) + "\n", encoding="utf-8")
        return path


def load_stoplist(path) -> frozenset[str]:
    """One token per line, normalized to grid letters."""
    entries = set()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            token = line.strip()
            if not token:
                continue
            try:
                entries.add(normalize_answer(token))
            except UnrepresentableError:
                log.warning("stoplist %s: unrepresentable entry %r skipped", path, token)
    return frozenset(entries)


def _snippet_tokens(snippet: str) -> list[str]:
    tokens = []
    for raw in _WORD_RE.findall(snippet):
        try:
            tokens.append(normalize_answer(raw))
        except UnrepresentableError:
            continue
    return [t for t in tokens if t]


def websearch_generate(
    clue: str,
    length: int,
    backend: SearchBackend,
    stoplist: frozenset[str] = frozenset(),
    clue_id: str = "",
    max_results: int = 10,
) -> CandidateList:
    """Token/ngram counting over ranked snippets; rank r weighs 1/r."""
    try:
        snippets = backend.query(clue, max_results)
    except Exception:
        log.warning("search backend failed for clue %r", clue, exc_info=True)
        return empty_list("websearch", clue_id)
    scores: dict[str, float] = {}
    for rank, snippet in enumerate(snippets, start=1):
        tokens = _snippet_tokens(snippet)
        weight = 1.0 / rank
        for n in range(1, MAX_NGRAM + 1):
            for i in range(len(tokens) - n + 1):
                candidate = "".join(tokens[i : i + n])
                if len(candidate) != length or candidate in stoplist:
                    continue
                scores[candidate] = scores.get(candidate, 0.0) + weight
    return list_from_scores(scores, "websearch", clue_id)


@dataclass
class WebSearchExpert:
    backend: SearchBackend
    stoplist: frozenset[str] = field(default_factory=frozenset)
    max_results: int = 10
    expert_id: str = "websearch"

    def generate(self, clue: str, length: int) -> CandidateList:
        return websearch_generate(
            clue, length, self.backend, self.stoplist, max_results=self.max_results
        )
