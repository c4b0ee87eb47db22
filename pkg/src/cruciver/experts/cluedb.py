"""Expert answering from previously solved clue-answer pairs."""

from __future__ import annotations

from dataclasses import dataclass

from ..puzzle import ClueDB
from .base import CandidateList, list_from_scores

DEFAULT_TIERS = (1.0, 0.6, 0.3)


def cluedb_generate(
    clue: str,
    length: int,
    db: ClueDB,
    clue_id: str = "",
    tiers: tuple[float, float, float] = DEFAULT_TIERS,
) -> CandidateList:
    """Tiered lookup: exact clue match, then folded, then token-set.

    Each record scores at its best matching tier; the candidate score is
    tier weight times stored frequency, normalized over the answers of
    the requested length.
    """
    seen: set[tuple[str, str]] = set()
    scores: dict[str, float] = {}
    for weight, lookup in zip(
        tiers, (db.lookup_exact, db.lookup_folded, db.lookup_tokenset)
    ):
        for record in lookup(clue):
            key = (record.clue, record.answer)
            if key in seen:
                continue
            seen.add(key)
            if len(record.answer) != length:
                continue
            scores[record.answer] = scores.get(record.answer, 0.0) + weight * record.frequency
    return list_from_scores(scores, "cluedb", clue_id)


@dataclass
class ClueDBExpert:
    db: ClueDB
    tiers: tuple[float, float, float] = DEFAULT_TIERS
    expert_id: str = "cluedb"

    def generate(self, clue: str, length: int) -> CandidateList:
        return cluedb_generate(clue, length, self.db, tiers=self.tiers)
