"""Retrieval expert over encoded historical clues.

The index holds one vector per stored clue-answer pair and answers
queries by exact k-nearest-neighbour cosine search (no approximation),
so rankings are reproducible and can be checked against brute force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..puzzle import ClueDB, ClueRecord
from .base import CandidateList, empty_list, list_from_scores
from .encoder import TrigramEncoder, Vector, cosine

DEFAULT_K = 50
DEFAULT_TEMPERATURE = 0.05


@dataclass(frozen=True)
class SimilarityIndex:
    encoder: TrigramEncoder
    entries: tuple[tuple[ClueRecord, Vector], ...]

    def nearest(self, query: str, k: int) -> list[tuple[float, ClueRecord]]:
        """Exact top-k by cosine; ties break on (clue, answer)."""
        qvec = self.encoder.encode(query)
        scored = [
            (cosine(qvec, vec), record) for record, vec in self.entries
        ]
        scored.sort(key=lambda sr: (-sr[0], sr[1].clue, sr[1].answer))
        return scored[:k]

    def __len__(self) -> int:
        return len(self.entries)


def build_similarity_index(db: ClueDB, encoder: TrigramEncoder | None = None) -> SimilarityIndex:
    """Encode every stored clue; the encoder is fitted on the corpus when omitted."""
    if encoder is None:
        encoder = TrigramEncoder.fit([r.clue for r in db.records])
    entries = tuple((record, encoder.encode(record.clue)) for record in db.records)
    return SimilarityIndex(encoder, entries)


def softmax(scores: list[float], temperature: float) -> list[float]:
    if not scores:
        return []
    top = max(scores)
    exps = [math.exp((s - top) / temperature) for s in scores]
    total = sum(exps)
    return [e / total for e in exps]


def similarity_generate(
    clue: str,
    length: int,
    index: SimilarityIndex,
    clue_id: str = "",
    k: int = DEFAULT_K,
    temperature: float = DEFAULT_TEMPERATURE,
) -> CandidateList:
    """Answers of the top-k most similar stored clues, softmax-weighted.

    The softmax runs over all k neighbours; candidates keep only the
    mass of right-length answers, which also becomes the confidence.
    """
    neighbours = index.nearest(clue, k)
    if not neighbours:
        return empty_list("similarity", clue_id)
    weights = softmax([score for score, _ in neighbours], temperature)
    scores: dict[str, float] = {}
    retained = 0.0
    for weight, (_, record) in zip(weights, neighbours):
        if len(record.answer) != length:
            continue
        retained += weight
        scores[record.answer] = scores.get(record.answer, 0.0) + weight
    return list_from_scores(scores, "similarity", clue_id, confidence=retained)


@dataclass
class SimilarityExpert:
    index: SimilarityIndex
    k: int = DEFAULT_K
    temperature: float = DEFAULT_TEMPERATURE
    expert_id: str = "similarity"

    def generate(self, clue: str, length: int) -> CandidateList:
        return similarity_generate(
            clue, length, self.index, k=self.k, temperature=self.temperature
        )
