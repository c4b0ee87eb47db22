"""Length-bucketed weighted merging of per-expert candidate lists.

Merged probability of an answer is the confidence-scaled, weight-scaled
sum of its per-expert probabilities, renormalized.  Weights live in a
table keyed by answer-length bucket and are trained by cyclic
coordinate ascent on mean reciprocal rank.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .experts.base import CandidateList, Expert, empty_list, expert_generate, list_from_scores
from .experts.lexicon import WILDCARD

log = logging.getLogger("cruciver.merge")

BUCKETS = ("2-3", "4-6", "7-9", "10+")
GRID_STEP = 0.05
_WEIGHT_TOLERANCE = 1e-9


class MergeError(ValueError):
    pass


def bucket_for(length: int) -> str:
    if length <= 3:
        return "2-3"
    if length <= 6:
        return "4-6"
    if length <= 9:
        return "7-9"
    return "10+"


@dataclass(frozen=True)
class WeightTable:
    """Per-bucket expert weight vectors; each vector sums to one."""

    buckets: dict[str, dict[str, float]]

    def __post_init__(self):
        if set(self.buckets) != set(BUCKETS):
            raise MergeError(f"weight table must define buckets {BUCKETS}")
        for bucket, vector in self.buckets.items():
            if not vector:
                raise MergeError(f"bucket {bucket}: empty weight vector")
            if any(w < 0 for w in vector.values()):
                raise MergeError(f"bucket {bucket}: negative weight")
            total = sum(vector.values())
            if abs(total - 1.0) > 1e-6:
                raise MergeError(f"bucket {bucket}: weights sum to {total}, not 1")

    @classmethod
    def uniform(cls, expert_ids) -> "WeightTable":
        ids = sorted(expert_ids)
        if not ids:
            raise MergeError("need at least one expert")
        share = 1.0 / len(ids)
        return cls({bucket: {eid: share for eid in ids} for bucket in BUCKETS})

    def vector(self, length: int) -> dict[str, float]:
        return self.buckets[bucket_for(length)]

    def expert_ids(self) -> tuple[str, ...]:
        ids = set()
        for vector in self.buckets.values():
            ids.update(vector)
        return tuple(sorted(ids))


def save_weight_table(table: WeightTable, path) -> None:
    lines = []
    for bucket in BUCKETS:
        for expert_id in sorted(table.buckets[bucket]):
            lines.append(f"{bucket}.{expert_id} = {table.buckets[bucket][expert_id]!r}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def load_weight_table(path) -> WeightTable:
    buckets: dict[str, dict[str, float]] = {bucket: {} for bucket in BUCKETS}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            bucket, _, expert_id = key.strip().partition(".")
            if bucket not in buckets or not expert_id:
                raise MergeError(f"{path}:{lineno}: bad weight key {key.strip()!r}")
            try:
                buckets[bucket][expert_id] = float(value.strip())
            except ValueError:
                raise MergeError(f"{path}:{lineno}: bad weight value") from None
    return WeightTable(buckets)


def _weighted_scores(
    lists: list[CandidateList], vector: dict[str, float]
) -> tuple[dict[str, float], float]:
    """Raw merged scores and the retained mass before normalization."""
    scores: dict[str, float] = {}
    mass = 0.0
    for clist in sorted(lists, key=lambda cl: cl.expert_id):
        try:
            weight = vector[clist.expert_id]
        except KeyError:
            raise MergeError(f"unknown expert {clist.expert_id!r} in weight table") from None
        scale = weight * clist.confidence
        if scale == 0.0:
            continue
        for cand in clist.candidates:
            scores[cand.answer] = scores.get(cand.answer, 0.0) + scale * cand.probability
            mass += scale * cand.probability
    return scores, mass


def merge_lists(
    lists,
    weights: WeightTable,
    length: int,
    clue_id: str = "",
) -> CandidateList:
    """Combine per-expert lists for one clue into a single ranked list.

    Input order never matters: lists are folded in expert-id order.
    """
    lists = list(lists)
    vector = weights.vector(length)
    scores, mass = _weighted_scores(lists, vector)
    return list_from_scores(scores, "merged", clue_id, confidence=min(1.0, mass))


def filter_list(clist: CandidateList, length: int, pattern: str | None = None) -> CandidateList:
    """Drop candidates violating the length or fixed-letter pattern.

    The survivors are renormalized; confidence scales by the retained
    probability mass.
    """
    if pattern is not None and len(pattern) != length:
        raise MergeError("pattern length does not match requested length")
    survivors = []
    retained = 0.0
    for cand in clist.candidates:
        if len(cand.answer) != length:
            continue
        if pattern is not None and any(
            p != WILDCARD and p != a for p, a in zip(pattern, cand.answer)
        ):
            continue
        survivors.append(cand)
        retained += cand.probability
    if not survivors:
        return empty_list(clist.expert_id, clist.clue_id)
    scores = {c.answer: c.probability for c in survivors}
    return list_from_scores(
        scores, clist.expert_id, clist.clue_id,
        confidence=min(1.0, clist.confidence * retained),
    )


# --- weight training ------------------------------------------------------


@dataclass(frozen=True)
class TrainingPair:
    clue: str
    gold: str

    def __post_init__(self):
        if not self.gold:
            raise ValueError("empty gold answer")


def _gold_rank(scores: dict[str, float], gold: str) -> int | None:
    """1-based rank of the gold answer; ties break alphabetically."""
    if gold not in scores:
        return None
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    for rank, (answer, _) in enumerate(ranked, start=1):
        if answer == gold:
            return rank
    return None


def _bucket_mrr(
    responses: list[tuple[str, list[CandidateList]]], vector: dict[str, float]
) -> float:
    """Mean reciprocal rank of the gold answers under a weight vector."""
    if not responses:
        return 0.0
    total = 0.0
    for gold, lists in responses:
        scores, _ = _weighted_scores(lists, vector)
        rank = _gold_rank(scores, gold)
        if rank is not None:
            total += 1.0 / rank
    return total / len(responses)


def _grid_values() -> list[float]:
    steps = round(1.0 / GRID_STEP)
    return [i * GRID_STEP for i in range(steps + 1)]


def _rescaled(vector: dict[str, float], expert_id: str, value: float) -> dict[str, float]:
    """Set one coordinate to ``value`` and rescale the rest onto the simplex."""
    others = {eid: w for eid, w in vector.items() if eid != expert_id}
    rest = sum(others.values())
    out = {expert_id: value}
    if rest > _WEIGHT_TOLERANCE:
        scale = (1.0 - value) / rest
        for eid, w in others.items():
            out[eid] = w * scale
    else:
        share = (1.0 - value) / len(others) if others else 0.0
        for eid in others:
            out[eid] = share
    return out


def train_weights(
    pairs,
    experts: list[Expert],
    initial: WeightTable | None = None,
) -> WeightTable:
    """Cyclic coordinate ascent on the simplex, maximizing training MRR.

    Deterministic given input order; buckets with no training pairs keep
    their initial weights (with a warning).  The returned table never has
    lower training MRR than its initialization.
    """
    expert_ids = sorted(e.expert_id for e in experts)
    if initial is None:
        initial = WeightTable.uniform(expert_ids)

    by_bucket: dict[str, list[tuple[str, list[CandidateList]]]] = {b: [] for b in BUCKETS}
    cache: dict[tuple[str, str, int], CandidateList] = {}
    for pair in pairs:
        length = len(pair.gold)
        lists = []
        for expert in sorted(experts, key=lambda e: e.expert_id):
            key = (expert.expert_id, pair.clue, length)
            if key not in cache:
                cache[key] = expert_generate(expert, pair.clue, length)
            lists.append(cache[key])
        by_bucket[bucket_for(length)].append((pair.gold, lists))

    grid = _grid_values()
    trained: dict[str, dict[str, float]] = {}
    for bucket in BUCKETS:
        responses = by_bucket[bucket]
        vector = dict(initial.buckets[bucket])
        if not responses:
            log.warning("bucket %s: no training pairs, keeping initial weights", bucket)
            trained[bucket] = vector
            continue
        if len(vector) == 1:
            trained[bucket] = {next(iter(vector)): 1.0}
            continue
        current = _bucket_mrr(responses, vector)
        improved = True
        while improved:
            improved = False
            for expert_id in sorted(vector):
                best_value, best_mrr = None, current
                for value in grid:
                    candidate = _rescaled(vector, expert_id, value)
                    mrr = _bucket_mrr(responses, candidate)
                    # Prefer strictly better MRR; among ties, the larger value.
                    if mrr > best_mrr + 1e-12 or (
                        best_value is not None and abs(mrr - best_mrr) <= 1e-12 and value > best_value
                    ):
                        best_value, best_mrr = value, mrr
                if best_value is not None:
                    vector = _rescaled(vector, expert_id, best_value)
                    current = best_mrr
                    improved = True
        trained[bucket] = vector
    return WeightTable(trained)
