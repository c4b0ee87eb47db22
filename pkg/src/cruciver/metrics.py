"""Evaluation percentages and competition scoring."""

from __future__ import annotations

from dataclasses import dataclass

from .puzzle import Puzzle, BLOCK

UNFILLED = "."


@dataclass(frozen=True)
class Metrics:
    """Percentages over clue-bearing slots (words) and open cells (letters)."""

    words_correct: float
    letters_correct: float
    letters_inserted: float

    def __post_init__(self):
        for name, value in (
            ("words_correct", self.words_correct),
            ("letters_correct", self.letters_correct),
            ("letters_inserted", self.letters_inserted),
        ):
            if not 0.0 <= value <= 100.0:
                raise ValueError(f"{name}={value} outside [0, 100]")
        if self.letters_correct > self.letters_inserted + 1e-9:
            raise ValueError("letters_correct cannot exceed letters_inserted")


def score_grid(grid_rows: tuple[str, ...], puzzle: Puzzle) -> Metrics:
    """Score a filled grid against the puzzle solution.

    ``grid_rows`` hold one letter per open cell, ``.`` when unfilled and
    ``#`` at blocks.  A word counts as correct only when every cell of
    its slot matches the solution.
    """
    if puzzle.solution is None:
        raise ValueError("puzzle has no solution to score against")
    open_cells = puzzle.grid.open_cells()
    inserted = correct = 0
    for r, c in open_cells:
        ch = grid_rows[r][c]
        if ch not in (UNFILLED, BLOCK):
            inserted += 1
            if ch == puzzle.solution[r][c]:
                correct += 1
    clue_slots = puzzle.clue_slots()
    words = 0
    for slot in clue_slots:
        if all(
            grid_rows[r][c] == puzzle.solution[r][c] and grid_rows[r][c] != UNFILLED
            for r, c in slot.cells()
        ):
            words += 1
    n_cells = len(open_cells)
    n_slots = len(clue_slots)
    return Metrics(
        words_correct=100.0 * words / n_slots if n_slots else 100.0,
        letters_correct=100.0 * correct / n_cells if n_cells else 100.0,
        letters_inserted=100.0 * inserted / n_cells if n_cells else 100.0,
    )


@dataclass(frozen=True)
class ChallengeScore:
    base: float
    time_bonus: float
    perfection_bonus: float

    @property
    def total(self) -> float:
        return self.base + self.time_bonus + self.perfection_bonus


def challenge_score(
    metrics: Metrics,
    elapsed: float,
    limit: float,
    base_max: float = 100.0,
) -> ChallengeScore:
    """Competition points: word-accuracy base plus time and perfection bonuses.

    The time bonus is linear in the fraction of unused time (up to 15
    points) and a fully correct grid adds 15 more; finishing over the
    time limit forfeits both bonuses.
    """
    if limit <= 0:
        raise ValueError("time limit must be positive")
    base = metrics.words_correct / 100.0 * base_max
    if elapsed > limit:
        return ChallengeScore(base, 0.0, 0.0)
    time_bonus = 15.0 * (1.0 - elapsed / limit)
    perfection = 15.0 if metrics.words_correct == 100.0 else 0.0
    return ChallengeScore(base, time_bonus, perfection)
