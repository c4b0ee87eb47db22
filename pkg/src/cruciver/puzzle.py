"""Grid and puzzle data model, puzzle parsing and slot extraction.

The puzzle file format is line-oriented text::

    ROWS 3
    COLS 3
    SOURCE some-collection        (optional)
    GRID
    ...
    .#.
    ...
    ACROSS
    A1<TAB>0,0<TAB>3<TAB>Clue text
    DOWN
    D1<TAB>0,0<TAB>3<TAB>Other clue
    SOLUTION                      (optional)
    BLE
    A#U
    SES

Grid rows use ``.`` for open cells and ``#`` for blocks; solution rows
repeat the blocks.  Clue coordinates are 0-based ``row,col``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from .text import ALPHABET, normalize_answer, fold_clue, clue_tokens, UnrepresentableError

log = logging.getLogger("cruciver.puzzle")

OPEN = "."
BLOCK = "#"


class PuzzleFormatError(ValueError):
    """Malformed puzzle or corpus document."""


class Direction(enum.Enum):
    ACROSS = "A"
    DOWN = "D"

    @property
    def step(self) -> tuple[int, int]:
        return (0, 1) if self is Direction.ACROSS else (1, 0)


@dataclass(frozen=True)
class Grid:
    """Rectangular cell matrix; rows are strings of ``.``/``#``."""

    rows: int
    cols: int
    cells: tuple[str, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid dimensions must be positive")
        if len(self.cells) != self.rows or any(len(r) != self.cols for r in self.cells):
            raise ValueError("cell matrix does not match declared dimensions")
        for row in self.cells:
            bad = set(row) - {OPEN, BLOCK}
            if bad:
                raise ValueError(f"invalid grid characters: {sorted(bad)}")

    def is_open(self, row: int, col: int) -> bool:
        return self.cells[row][col] == OPEN

    def open_cells(self) -> list[tuple[int, int]]:
        return [
            (r, c)
            for r in range(self.rows)
            for c in range(self.cols)
            if self.is_open(r, c)
        ]


@dataclass(frozen=True)
class Slot:
    """A maximal run of open cells holding one answer.

    Clue-bearing slots have length >= 2; single-cell slots cover isolated
    cells so the char-based solver can still fill them.
    """

    id: str
    direction: Direction
    start: tuple[int, int]
    length: int
    clue: str | None = None

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"slot {self.id}: length must be >= 1")
        if self.clue is not None and self.length < 2:
            raise ValueError(f"slot {self.id}: clue-bearing slots need length >= 2")

    def cells(self) -> list[tuple[int, int]]:
        dr, dc = self.direction.step
        r, c = self.start
        return [(r + i * dr, c + i * dc) for i in range(self.length)]


@dataclass(frozen=True)
class Crossing:
    """Per-cell incidence: which slot/position covers the cell per direction."""

    cell: tuple[int, int]
    across: tuple[str, int] | None = None
    down: tuple[str, int] | None = None

    def __post_init__(self):
        if self.across is None and self.down is None:
            raise ValueError(f"cell {self.cell} covered by no slot")


@dataclass(frozen=True)
class Puzzle:
    grid: Grid
    slots: tuple[Slot, ...]
    solution: tuple[str, ...] | None = None
    source: str | None = None

    def __post_init__(self):
        ids = [s.id for s in self.slots]
        if len(set(ids)) != len(ids):
            raise ValueError("slot ids must be unique")
        coverage: dict[tuple[int, int], list[Slot]] = {}
        for slot in self.slots:
            for r, c in slot.cells():
                if not (0 <= r < self.grid.rows and 0 <= c < self.grid.cols):
                    raise ValueError(f"slot {slot.id} leaves the grid")
                if not self.grid.is_open(r, c):
                    raise ValueError(f"slot {slot.id} covers a block at {(r, c)}")
                coverage.setdefault((r, c), []).append(slot)
        for cell in self.grid.open_cells():
            covering = coverage.get(cell, [])
            if not 1 <= len(covering) <= 2:
                raise ValueError(f"cell {cell} covered by {len(covering)} slots")
            dirs = [s.direction for s in covering]
            if len(dirs) != len(set(dirs)):
                raise ValueError(f"cell {cell} covered twice in one direction")
        if self.solution is not None:
            _check_solution(self.grid, self.solution)

    def clue_slots(self) -> tuple[Slot, ...]:
        return tuple(s for s in self.slots if s.clue is not None)

    def slot_by_id(self, slot_id: str) -> Slot:
        for slot in self.slots:
            if slot.id == slot_id:
                return slot
        raise KeyError(slot_id)


def _check_solution(grid: Grid, solution: tuple[str, ...]) -> None:
    if len(solution) != grid.rows or any(len(r) != grid.cols for r in solution):
        raise ValueError("solution dimensions do not match the grid")
    for r in range(grid.rows):
        for c in range(grid.cols):
            ch = solution[r][c]
            if grid.is_open(r, c):
                if ch not in ALPHABET:
                    raise ValueError(
                        f"solution letter {ch!r} at {(r, c)} outside the canonical alphabet"
                    )
            elif ch != BLOCK:
                raise ValueError(f"solution must carry {BLOCK!r} at block {(r, c)}")


def _runs(line: str) -> list[tuple[int, int]]:
    """(start, length) of maximal open runs in a row/column string."""
    runs = []
    start = None
    for i, ch in enumerate(line + BLOCK):
        if ch == OPEN and start is None:
            start = i
        elif ch != OPEN and start is not None:
            runs.append((start, i - start))
            start = None
    return runs


def extract_slots(grid: Grid) -> list[Slot]:
    """Enumerate the maximal open runs of a grid as unclued slots.

    Runs of length >= 2 become regular slots.  A run of length 1 is kept
    (as a single-cell across slot) only when no longer run covers its
    cell, so that every open cell is covered exactly once or twice.
    Ordering is row-major by start cell, across before down; ids are
    ``A<n>``/``D<n>`` in that order, ``B<n>`` for single cells.
    """
    across = []
    for r in range(grid.rows):
        for start, length in _runs(grid.cells[r]):
            if length >= 2:
                across.append(((r, start), length))
    down = []
    for c in range(grid.cols):
        column = "".join(grid.cells[r][c] for r in range(grid.rows))
        for start, length in _runs(column):
            if length >= 2:
                down.append(((start, c), length))

    covered = set()
    slots: list[tuple[tuple[int, int], Direction, int]] = []
    for (start, length) in across:
        slots.append((start, Direction.ACROSS, length))
    for (start, length) in down:
        slots.append((start, Direction.DOWN, length))
    for start, direction, length in slots:
        dr, dc = direction.step
        covered.update((start[0] + i * dr, start[1] + i * dc) for i in range(length))
    for cell in grid.open_cells():
        if cell not in covered:
            slots.append((cell, Direction.ACROSS, 1))

    slots.sort(key=lambda s: (s[0][0], s[0][1], s[1] is Direction.DOWN))
    counters = {"A": 0, "D": 0, "B": 0}
    result = []
    for start, direction, length in slots:
        prefix = "B" if length == 1 else direction.value
        counters[prefix] += 1
        result.append(Slot(f"{prefix}{counters[prefix]}", direction, start, length))
    return result


def crossings(puzzle: Puzzle) -> list[Crossing]:
    """One crossing per open cell, row-major; blind cells have one side."""
    across: dict[tuple[int, int], tuple[str, int]] = {}
    down: dict[tuple[int, int], tuple[str, int]] = {}
    for slot in puzzle.slots:
        table = across if slot.direction is Direction.ACROSS else down
        for pos, cell in enumerate(slot.cells()):
            table[cell] = (slot.id, pos)
    return [
        Crossing(cell, across.get(cell), down.get(cell))
        for cell in puzzle.grid.open_cells()
    ]


# --- puzzle file parsing ------------------------------------------------

_SECTIONS = ("GRID", "ACROSS", "DOWN", "SOLUTION")


def parse_puzzle(document: str) -> Puzzle:
    """Parse the text puzzle format into a validated :class:`Puzzle`."""
    lines = document.splitlines()
    idx = 0
    headers: dict[str, str] = {}
    while idx < len(lines):
        line = lines[idx].rstrip("\n")
        if not line.strip():
            idx += 1
            continue
        if line.strip() == "GRID":
            break
        parts = line.split(None, 1)
        key = parts[0].upper()
        if key in ("ROWS", "COLS", "SOURCE"):
            if len(parts) != 2:
                raise PuzzleFormatError(f"header line {idx + 1}: missing value")
            headers[key] = parts[1].strip()
            idx += 1
        else:
            raise PuzzleFormatError(f"line {idx + 1}: unexpected {parts[0]!r} before GRID")
    else:
        raise PuzzleFormatError("missing GRID section")

    try:
        rows = int(headers["ROWS"])
        cols = int(headers["COLS"])
    except KeyError as exc:
        raise PuzzleFormatError(f"missing header {exc.args[0]}") from None
    except ValueError:
        raise PuzzleFormatError("ROWS/COLS must be integers") from None

    idx += 1  # past GRID
    if idx + rows > len(lines):
        raise PuzzleFormatError("grid block shorter than declared ROWS")
    grid_rows = [lines[idx + r].rstrip() for r in range(rows)]
    idx += rows
    try:
        grid = Grid(rows, cols, tuple(grid_rows))
    except ValueError as exc:
        raise PuzzleFormatError(str(exc)) from None

    clues: dict[str, tuple[str, Direction, tuple[int, int], int, str]] = {}
    solution_rows: list[str] | None = None
    section = None
    while idx < len(lines):
        line = lines[idx]
        idx += 1
        stripped = line.strip()
        if not stripped and section != "SOLUTION":
            continue
        if stripped in ("ACROSS", "DOWN", "SOLUTION"):
            section = stripped
            if section == "SOLUTION":
                solution_rows = []
            continue
        if section in ("ACROSS", "DOWN"):
            fields = line.rstrip("\n").split("\t", 3)
            if len(fields) != 4:
                raise PuzzleFormatError(f"clue line {idx}: expected 4 tab-separated fields")
            slot_id, coord, length_s, clue = fields
            try:
                r_s, c_s = coord.split(",")
                start = (int(r_s), int(c_s))
                length = int(length_s)
            except ValueError:
                raise PuzzleFormatError(f"clue line {idx}: bad coordinates or length") from None
            if slot_id in clues:
                raise PuzzleFormatError(f"duplicate slot id {slot_id!r}")
            direction = Direction.ACROSS if section == "ACROSS" else Direction.DOWN
            clues[slot_id] = (slot_id, direction, start, length, clue)
        elif section == "SOLUTION":
            if stripped:
                solution_rows.append(stripped)
        else:
            raise PuzzleFormatError(f"line {idx}: content outside any section")

    derived = extract_slots(grid)
    derived_clue_slots = {
        (s.direction, s.start, s.length): s for s in derived if s.length >= 2
    }
    if len(clues) != len(derived_clue_slots):
        raise PuzzleFormatError(
            f"clue count mismatch: document declares {len(clues)} clues, "
            f"grid yields {len(derived_clue_slots)} slots"
        )
    matched: dict[tuple[Direction, tuple[int, int], int], Slot] = {}
    for slot_id, direction, start, length, clue in clues.values():
        key = (direction, start, length)
        if key not in derived_clue_slots:
            raise PuzzleFormatError(
                f"clue {slot_id!r} ({direction.value} {start} len {length}) "
                "does not match any grid slot"
            )
        if key in matched:
            raise PuzzleFormatError(f"two clues declared for the same slot {key}")
        matched[key] = Slot(slot_id, direction, start, length, clue)

    final_slots = []
    for slot in derived:
        key = (slot.direction, slot.start, slot.length)
        final_slots.append(matched[key] if slot.length >= 2 else slot)

    solution = None
    if solution_rows is not None:
        try:
            _check_solution(grid, tuple(solution_rows))
        except ValueError as exc:
            raise PuzzleFormatError(str(exc)) from None
        solution = tuple(solution_rows)

    return Puzzle(grid, tuple(final_slots), solution, headers.get("SOURCE"))


def serialize_puzzle(puzzle: Puzzle) -> str:
    """Render a puzzle back to the text format (canonical form)."""
    out = [f"ROWS {puzzle.grid.rows}", f"COLS {puzzle.grid.cols}"]
    if puzzle.source:
        out.append(f"SOURCE {puzzle.source}")
    out.append("GRID")
    out.extend(puzzle.grid.cells)
    for section, direction in (("ACROSS", Direction.ACROSS), ("DOWN", Direction.DOWN)):
        slots = [s for s in puzzle.slots if s.clue is not None and s.direction is direction]
        if slots:
            out.append(section)
            for s in slots:
                out.append(f"{s.id}\t{s.start[0]},{s.start[1]}\t{s.length}\t{s.clue}")
    if puzzle.solution is not None:
        out.append("SOLUTION")
        out.extend(puzzle.solution)
    return "\n".join(out) + "\n"


def load_puzzle(path) -> Puzzle:
    with open(path, encoding="utf-8") as handle:
        return parse_puzzle(handle.read())


# --- clue-answer corpus -------------------------------------------------


@dataclass(frozen=True)
class ClueRecord:
    clue: str
    answer: str
    source: str
    frequency: int

    def __post_init__(self):
        if not self.answer:
            raise ValueError("empty answer")
        if any(ch not in ALPHABET for ch in self.answer):
            raise ValueError(f"answer {self.answer!r} outside the canonical alphabet")
        if self.frequency < 1:
            raise ValueError("frequency must be positive")


@dataclass
class ClueDB:
    """Indexed clue-answer pairs supporting tiered lookup."""

    records: list[ClueRecord] = field(default_factory=list)
    _exact: dict[str, list[ClueRecord]] = field(default_factory=dict, repr=False)
    _folded: dict[str, list[ClueRecord]] = field(default_factory=dict, repr=False)
    _tokens: dict[frozenset, list[ClueRecord]] = field(default_factory=dict, repr=False)

    @classmethod
    def from_records(cls, records) -> "ClueDB":
        db = cls()
        merged: dict[tuple[str, str], ClueRecord] = {}
        for rec in records:
            key = (rec.clue, rec.answer)
            if key in merged:
                prev = merged[key]
                merged[key] = ClueRecord(
                    prev.clue, prev.answer, prev.source, prev.frequency + rec.frequency
                )
            else:
                merged[key] = rec
        db.records = list(merged.values())
        for rec in db.records:
            db._exact.setdefault(rec.clue, []).append(rec)
            db._folded.setdefault(fold_clue(rec.clue), []).append(rec)
            db._tokens.setdefault(frozenset(clue_tokens(rec.clue)), []).append(rec)
        return db

    def lookup_exact(self, clue: str) -> list[ClueRecord]:
        return list(self._exact.get(clue, ()))

    def lookup_folded(self, clue: str) -> list[ClueRecord]:
        return list(self._folded.get(fold_clue(clue), ()))

    def lookup_tokenset(self, clue: str) -> list[ClueRecord]:
        return list(self._tokens.get(frozenset(clue_tokens(clue)), ()))

    def __len__(self) -> int:
        return len(self.records)


def load_clue_db(path, max_skip_fraction: float = 0.1) -> ClueDB:
    """Load a tab-separated ``clue, answer, source, frequency`` corpus.

    Malformed lines are reported with their line number and skipped; the
    load fails outright when more than ``max_skip_fraction`` of the
    non-blank lines are bad.  Duplicate (clue, answer) pairs collapse
    with summed frequency.
    """
    records = []
    skipped = 0
    total = 0
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            total += 1
            fields = line.split("\t")
            if len(fields) != 4:
                log.warning("%s:%d: expected 4 fields, got %d; line skipped", path, lineno, len(fields))
                skipped += 1
                continue
            clue, answer, source, freq_s = fields
            try:
                record = ClueRecord(clue, normalize_answer(answer), source, int(freq_s))
            except (ValueError, UnrepresentableError) as exc:
                log.warning("%s:%d: %s; line skipped", path, lineno, exc)
                skipped += 1
                continue
            if not clue.strip():
                log.warning("%s:%d: empty clue; line skipped", path, lineno)
                skipped += 1
                continue
            records.append(record)
    if total and skipped / total > max_skip_fraction:
        raise PuzzleFormatError(
            f"{path}: {skipped}/{total} lines malformed (more than {max_skip_fraction:.0%})"
        )
    return ClueDB.from_records(records)
