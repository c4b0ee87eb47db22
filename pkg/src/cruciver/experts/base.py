"""Candidate list types and the expert protocol.

Every expert maps ``(clue, answer length)`` to a :class:`CandidateList`.
List invariants (distinct answers of the requested length, probabilities
summing to one, descending order) are enforced at construction so any
violation anywhere in the pipeline surfaces immediately.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from ..text import ALPHABET

log = logging.getLogger("cruciver.experts")

PROB_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Candidate:
    answer: str
    probability: float

    def __post_init__(self):
        if not self.answer or any(ch not in ALPHABET for ch in self.answer):
            raise ValueError(f"candidate answer {self.answer!r} outside A-Z")
        if not self.probability > 0:
            raise ValueError(f"candidate {self.answer!r}: probability must be > 0")


@dataclass(frozen=True)
class CandidateList:
    """Normalized ranked answers for one clue from one expert."""

    clue_id: str
    candidates: tuple[Candidate, ...]
    expert_id: str
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if not self.candidates:
            return
        answers = [c.answer for c in self.candidates]
        if len(set(answers)) != len(answers):
            raise ValueError("duplicate answers in candidate list")
        lengths = {len(a) for a in answers}
        if len(lengths) != 1:
            raise ValueError(f"mixed answer lengths {sorted(lengths)}")
        total = sum(c.probability for c in self.candidates)
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        probs = [c.probability for c in self.candidates]
        if any(a < b for a, b in zip(probs, probs[1:])):
            raise ValueError("candidates not in descending probability order")

    def __len__(self) -> int:
        return len(self.candidates)

    def probability_of(self, answer: str) -> float:
        for cand in self.candidates:
            if cand.answer == answer:
                return cand.probability
        return 0.0

    def answers(self) -> tuple[str, ...]:
        return tuple(c.answer for c in self.candidates)


def empty_list(expert_id: str, clue_id: str = "") -> CandidateList:
    return CandidateList(clue_id, (), expert_id, 0.0)


def list_from_scores(
    scores: dict[str, float],
    expert_id: str,
    clue_id: str = "",
    confidence: float | None = None,
) -> CandidateList:
    """Build a normalized list from raw answer scores.

    Non-positive scores are dropped.  When ``confidence`` is omitted it
    defaults to the raw probability mass retained before normalization,
    clamped to [0, 1].
    """
    positive = {a: s for a, s in scores.items() if s > 0}
    if not positive:
        return empty_list(expert_id, clue_id)
    total = sum(positive.values())
    if confidence is None:
        confidence = min(1.0, total)
    ranked = sorted(positive.items(), key=lambda kv: (-kv[1], kv[0]))
    candidates = tuple(Candidate(a, s / total) for a, s in ranked)
    return CandidateList(clue_id, candidates, expert_id, min(1.0, max(0.0, confidence)))


@runtime_checkable
class Expert(Protocol):
    """Candidate generator: (clue, length) -> ranked probability list."""

    expert_id: str

    def generate(self, clue: str, length: int) -> CandidateList: ...


def expert_generate(expert: Expert, clue: str, length: int) -> CandidateList:
    """Run one expert defensively.

    Experts degrade to empty lists; infrastructure failures surface as
    warnings, never as solve failures.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    try:
        return expert.generate(clue, length)
    except Exception:
        log.warning("expert %s failed on clue %r", expert.expert_id, clue, exc_info=True)
        return empty_list(expert.expert_id)


@dataclass
class StaticExpert:
    """Expert with a fixed response table, used for tests and delegates."""

    expert_id: str
    table: dict[tuple[str, int], dict[str, float]] = field(default_factory=dict)

    def generate(self, clue: str, length: int) -> CandidateList:
        scores = self.table.get((clue, length))
        if not scores:
            return empty_list(self.expert_id)
        return list_from_scores(scores, self.expert_id)
