"""Test-set evaluation, ablation studies and competition scoring."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .config import ConfigError, Engine
from .metrics import ChallengeScore, Metrics, challenge_score, score_grid
from .puzzle import Puzzle, PuzzleFormatError, load_puzzle
from .solver import SolveOptions, SolveReport, solve

log = logging.getLogger("cruciver.harness")

__all__ = [
    "ChallengeScore",
    "Metrics",
    "challenge_score",
    "score_solution",
    "run_testset",
    "run_ablation",
    "EvalRow",
    "EvalTable",
    "AblationRow",
    "AblationTable",
]

OVERALL = "ALL"


def score_solution(report: SolveReport, puzzle: Puzzle) -> Metrics:
    """Words/letters/inserted percentages of a report against the solution."""
    return score_grid(report.grid_rows, puzzle)


@dataclass(frozen=True)
class EvalRow:
    source: str
    puzzles: int
    words_correct: float
    letters_correct: float
    letters_inserted: float


@dataclass(frozen=True)
class EvalTable:
    rows: tuple[EvalRow, ...]
    per_puzzle: tuple[tuple[str, str, Metrics], ...]  # (path name, source, metrics)
    skipped: tuple[tuple[str, str], ...]  # (path name, reason)

    def overall(self) -> EvalRow:
        for row in self.rows:
            if row.source == OVERALL:
                return row
        raise KeyError(OVERALL)


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def _aggregate(per_puzzle: list[tuple[str, str, Metrics]]) -> list[EvalRow]:
    by_source: dict[str, list[Metrics]] = {}
    for _, source, metrics in per_puzzle:
        by_source.setdefault(source, []).append(metrics)
    rows = []
    for source in sorted(by_source):
        group = by_source[source]
        rows.append(
            EvalRow(
                source,
                len(group),
                _mean([m.words_correct for m in group]),
                _mean([m.letters_correct for m in group]),
                _mean([m.letters_inserted for m in group]),
            )
        )
    everything = [m for _, _, m in per_puzzle]
    rows.append(
        EvalRow(
            OVERALL,
            len(everything),
            _mean([m.words_correct for m in everything]),
            _mean([m.letters_correct for m in everything]),
            _mean([m.letters_inserted for m in everything]),
        )
    )
    return rows


def run_testset(
    directory,
    engine: Engine,
    expert_subset: tuple[str, ...] | None = None,
    options: SolveOptions | None = None,
) -> EvalTable:
    """Solve every puzzle file in a directory and aggregate per source.

    Puzzles must carry solutions; unreadable files are skipped with a
    warning and counted.  Files are processed in sorted order so the
    aggregate is independent of directory listing order.
    """
    directory = Path(directory)
    paths = sorted(p for p in directory.iterdir() if p.is_file())
    experts = engine.active_experts(expert_subset)
    per_puzzle: list[tuple[str, str, Metrics]] = []
    skipped: list[tuple[str, str]] = []
    for path in paths:
        try:
            puzzle = load_puzzle(path)
            if puzzle.solution is None:
                raise PuzzleFormatError("puzzle has no solution")
        except (PuzzleFormatError, ValueError, OSError) as exc:
            log.warning("skipping %s: %s", path, exc)
            skipped.append((path.name, str(exc)))
            continue
        report = solve(puzzle, experts, engine.weights, options or engine.solve_options())
        source = puzzle.source or "unknown"
        per_puzzle.append((path.name, source, report.metrics))
    return EvalTable(tuple(_aggregate(per_puzzle)), tuple(per_puzzle), tuple(skipped))


@dataclass(frozen=True)
class AblationRow:
    name: str
    words_correct: float
    letters_correct: float
    word_drop: float | None  # None for the baseline row


@dataclass(frozen=True)
class AblationTable:
    rows: tuple[AblationRow, ...]
    tables: dict[str, EvalTable]


FULL = "full"


def parse_subsets(text: str, known: tuple[str, ...]) -> list[tuple[str, tuple[str, ...]]]:
    """``name = id,id,...`` lines naming expert subsets."""
    subsets = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, ids = line.partition("=")
        if not sep:
            raise ConfigError(f"subsets line {lineno}: expected name = ids")
        expert_ids = tuple(e.strip() for e in ids.split(",") if e.strip())
        unknown = set(expert_ids) - set(known)
        if unknown:
            raise ConfigError(f"subsets line {lineno}: unknown expert ids {sorted(unknown)}")
        subsets.append((name.strip(), expert_ids))
    return subsets


def run_ablation(
    directory,
    engine: Engine,
    subsets: list[tuple[str, tuple[str, ...]]],
    options: SolveOptions | None = None,
) -> AblationTable:
    """One test-set run per expert subset, with word drop against Full.

    A subset named ``full`` is the baseline; when absent, the engine's
    configured expert set is run first under that name.
    """
    names = [name for name, _ in subsets]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate subset names")
    ordered = list(subsets)
    if FULL not in names:
        ordered.insert(0, (FULL, engine.config.experts))

    tables: dict[str, EvalTable] = {}
    for name, expert_ids in ordered:
        tables[name] = run_testset(directory, engine, expert_ids, options)

    baseline = tables[FULL].overall()
    rows = []
    for name, _ in ordered:
        overall = tables[name].overall()
        drop = None if name == FULL else baseline.words_correct - overall.words_correct
        rows.append(
            AblationRow(name, overall.words_correct, overall.letters_correct, drop)
        )
    return AblationTable(tuple(rows), tables)
