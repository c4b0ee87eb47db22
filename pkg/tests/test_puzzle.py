"""Grid model, slot extraction, parsing and the clue corpus."""

import random

import pytest

from cruciver.puzzle import (
    BLOCK,
    OPEN,
    ClueRecord,
    Direction,
    Grid,
    Puzzle,
    PuzzleFormatError,
    Slot,
    crossings,
    extract_slots,
    load_clue_db,
    parse_puzzle,
    serialize_puzzle,
)


def brute_force_runs(grid: Grid):
    """Oracle: enumerate maximal open runs of length >= 2 by direct scan."""
    runs = []
    for r in range(grid.rows):
        c = 0
        while c < grid.cols:
            if grid.is_open(r, c) and (c == 0 or not grid.is_open(r, c - 1)):
                length = 0
                while c + length < grid.cols and grid.is_open(r, c + length):
                    length += 1
                if length >= 2:
                    runs.append((Direction.ACROSS, (r, c), length))
                c += length
            else:
                c += 1
    for c in range(grid.cols):
        r = 0
        while r < grid.rows:
            if grid.is_open(r, c) and (r == 0 or not grid.is_open(r - 1, c)):
                length = 0
                while r + length < grid.rows and grid.is_open(r + length, c):
                    length += 1
                if length >= 2:
                    runs.append((Direction.DOWN, (r, c), length))
                r += length
            else:
                r += 1
    return sorted(runs, key=lambda rn: (rn[1], rn[0] is Direction.DOWN))


def random_grid(rng, rows, cols, block_prob=0.25) -> Grid:
    cells = tuple(
        "".join(BLOCK if rng.random() < block_prob else OPEN for _ in range(cols))
        for _ in range(rows)
    )
    return Grid(rows, cols, cells)


class TestGrid:
    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            Grid(2, 2, ("..",))
        with pytest.raises(ValueError):
            Grid(0, 1, ())
        with pytest.raises(ValueError):
            Grid(1, 2, ("x.",))


class TestExtractSlots:
    def test_single_row(self):
        slots = extract_slots(Grid(1, 5, (".....",)))
        assert len(slots) == 1
        assert slots[0].direction is Direction.ACROSS
        assert slots[0].start == (0, 0)
        assert slots[0].length == 5

    def test_open_5x5(self):
        slots = extract_slots(Grid(5, 5, (".....",) * 5))
        across = [s for s in slots if s.direction is Direction.ACROSS]
        down = [s for s in slots if s.direction is Direction.DOWN]
        assert len(across) == 5 and len(down) == 5
        assert all(s.length == 5 for s in slots)

    def test_center_block_3x3(self):
        # Four maximal runs of length 3; the four length-1 runs are dropped.
        slots = extract_slots(Grid(3, 3, ("...", ".#.", "...")))
        assert len(slots) == 4
        assert sorted((s.direction.value, s.start, s.length) for s in slots) == [
            ("A", (0, 0), 3),
            ("A", (2, 0), 3),
            ("D", (0, 0), 3),
            ("D", (0, 2), 3),
        ]

    def test_isolated_cell_kept_as_single(self):
        slots = extract_slots(Grid(2, 2, (".#", "##")))
        assert len(slots) == 1
        assert slots[0].length == 1 and slots[0].clue is None

    def test_matches_brute_force_on_random_grids(self):
        rng = random.Random(1234)
        for _ in range(60):
            grid = random_grid(rng, rng.randint(2, 8), rng.randint(2, 8))
            expected = brute_force_runs(grid)
            got = [
                (s.direction, s.start, s.length)
                for s in extract_slots(grid)
                if s.length >= 2
            ]
            assert sorted(got, key=lambda rn: (rn[1], rn[0] is Direction.DOWN)) == expected

    def test_idempotent(self):
        grid = Grid(3, 3, ("...", ".#.", "..."))
        first = extract_slots(grid)
        second = extract_slots(grid)
        assert first == second


def puzzle_from_grid(grid: Grid) -> Puzzle:
    slots = tuple(
        Slot(s.id, s.direction, s.start, s.length, f"clue {s.id}" if s.length >= 2 else None)
        for s in extract_slots(grid)
    )
    return Puzzle(grid, slots)


class TestCrossings:
    def test_open_2x2_all_double(self):
        puzzle = puzzle_from_grid(Grid(2, 2, ("..", "..")))
        result = crossings(puzzle)
        assert len(result) == 4
        assert all(c.across is not None and c.down is not None for c in result)

    def test_1x3_has_no_down_sides(self):
        puzzle = puzzle_from_grid(Grid(1, 3, ("...",)))
        result = crossings(puzzle)
        assert len(result) == 3
        assert all(c.down is None for c in result)
        assert all(c.across is not None for c in result)

    def test_every_slot_position_appears_exactly_once(self):
        rng = random.Random(77)
        for _ in range(30):
            grid = random_grid(rng, 6, 6)
            try:
                puzzle = puzzle_from_grid(grid)
            except ValueError:
                continue  # grids with uncoverable geometry are not puzzles
            seen = []
            for crossing in crossings(puzzle):
                for side in (crossing.across, crossing.down):
                    if side is not None:
                        seen.append(side)
            expected = []
            for slot in puzzle.slots:
                expected.extend((slot.id, i) for i in range(slot.length))
            assert sorted(seen) == sorted(expected)


class TestPuzzleInvariants:
    def test_coverage_one_or_two(self):
        rng = random.Random(9)
        for _ in range(40):
            grid = random_grid(rng, rng.randint(2, 7), rng.randint(2, 7))
            puzzle = puzzle_from_grid(grid)
            counts = {}
            for slot in puzzle.slots:
                for cell in slot.cells():
                    counts[cell] = counts.get(cell, 0) + 1
            for cell in grid.open_cells():
                assert counts[cell] in (1, 2)

    def test_duplicate_ids_rejected(self):
        grid = Grid(1, 4, ("....",))
        slot = Slot("A1", Direction.ACROSS, (0, 0), 4, "x")
        with pytest.raises(ValueError, match="unique"):
            Puzzle(grid, (slot, slot))

    def test_clue_bearing_needs_length_two(self):
        with pytest.raises(ValueError, match="length >= 2"):
            Slot("A1", Direction.ACROSS, (0, 0), 1, "a clue")


SMALL_DOC = """ROWS 2
COLS 2
GRID
..
..
ACROSS
A1\t0,0\t2\tun
A2\t1,0\t2\tdeux
DOWN
D1\t0,0\t2\ttrois
D2\t0,1\t2\tquatre
SOLUTION
ET
TE
"""


class TestParsePuzzle:
    def test_smallest_legal_grid(self):
        puzzle = parse_puzzle(SMALL_DOC)
        clue_slots = puzzle.clue_slots()
        assert len(clue_slots) == 4
        assert {s.length for s in clue_slots} == {2}
        assert puzzle.solution == ("ET", "TE")

    def test_clue_count_mismatch(self):
        doc = SMALL_DOC.replace("A2\t1,0\t2\tdeux\n", "")
        with pytest.raises(PuzzleFormatError, match="clue count mismatch"):
            parse_puzzle(doc)

    def test_clue_not_matching_grid(self):
        doc = SMALL_DOC.replace("A2\t1,0\t2\tdeux", "A2\t1,1\t2\tdeux")
        with pytest.raises(PuzzleFormatError, match="does not match"):
            parse_puzzle(doc)

    def test_solution_letter_on_block(self):
        doc = """ROWS 2
COLS 2
GRID
..
.#
ACROSS
A1\t0,0\t2\tun
DOWN
D1\t0,0\t2\tdeux
SOLUTION
ET
TE
"""
        with pytest.raises(PuzzleFormatError, match="block"):
            parse_puzzle(doc)

    def test_bad_solution_letter(self):
        doc = SMALL_DOC.replace("ET\nTE", "E7\nTE")
        with pytest.raises(PuzzleFormatError, match="alphabet"):
            parse_puzzle(doc)

    def test_missing_headers(self):
        with pytest.raises(PuzzleFormatError, match="ROWS"):
            parse_puzzle("COLS 2\nGRID\n..\n")

    def test_center_block_document(self):
        doc = """ROWS 3
COLS 3
GRID
...
.#.
...
ACROSS
A1\t0,0\t3\tc1
A2\t2,0\t3\tc2
DOWN
D1\t0,0\t3\tc3
D2\t0,2\t3\tc4
"""
        puzzle = parse_puzzle(doc)
        assert len(puzzle.clue_slots()) == 4
        assert all(s.length == 3 for s in puzzle.clue_slots())

    def test_round_trip(self):
        puzzle = parse_puzzle(SMALL_DOC)
        again = parse_puzzle(serialize_puzzle(puzzle))
        assert again == puzzle

    def test_round_trip_with_source_and_blocks(self):
        doc = """ROWS 2
COLS 2
SOURCE beta
GRID
..
.#
ACROSS
A1\t0,0\t2\tun
DOWN
D1\t0,0\t2\tdeux
SOLUTION
RG
A#
"""
        puzzle = parse_puzzle(doc)
        assert puzzle.source == "beta"
        assert parse_puzzle(serialize_puzzle(puzzle)) == puzzle


class TestClueDB:
    def test_duplicate_pairs_collapse(self, tmp_path):
        path = tmp_path / "db.tsv"
        path.write_text(
            "Sick\tILL\ta\t5\nSick\tILL\tb\t2\n", encoding="utf-8"
        )
        db = load_clue_db(path)
        assert len(db) == 1
        assert db.records[0].frequency == 7

    def test_empty_file(self, tmp_path):
        path = tmp_path / "db.tsv"
        path.write_text("", encoding="utf-8")
        assert len(load_clue_db(path)) == 0

    def test_malformed_lines_skipped_with_warnings(self, tmp_path, caplog):
        lines = [f"clue {i}\tMOT\tsrc\t1" for i in range(97)]
        lines.insert(10, "too\tfew")
        lines.insert(40, "clue x\tMOT\tsrc\tnot-a-number")
        lines.insert(70, "clue y\tM0T\tsrc\t1")
        path = tmp_path / "db.tsv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with caplog.at_level("WARNING"):
            db = load_clue_db(path)
        assert len(db.records) == 97
        assert len([r for r in caplog.records if "skipped" in r.message]) == 3

    def test_too_many_malformed_lines_fail(self, tmp_path):
        path = tmp_path / "db.tsv"
        path.write_text("good\tMOT\tsrc\t1\nbad line\nalso bad\n", encoding="utf-8")
        with pytest.raises(PuzzleFormatError, match="malformed"):
            load_clue_db(path)

    def test_answers_normalized(self, tmp_path):
        path = tmp_path / "db.tsv"
        path.write_text("clue\tcôte d'azur\tsrc\t1\n", encoding="utf-8")
        db = load_clue_db(path)
        assert db.records[0].answer == "COTEDAZUR"

    def test_record_validation(self):
        with pytest.raises(ValueError):
            ClueRecord("clue", "", "src", 1)
        with pytest.raises(ValueError):
            ClueRecord("clue", "mot", "src", 1)  # lowercase not canonical
        with pytest.raises(ValueError):
            ClueRecord("clue", "MOT", "src", 0)
