"""Metrics, competition scoring, test-set evaluation and ablation."""

import pytest

from cruciver.experts import StaticExpert
from cruciver.harness import (
    parse_subsets,
    run_ablation,
    run_testset,
    score_solution,
)
from cruciver.merge import WeightTable
from cruciver.metrics import Metrics, challenge_score, score_grid
from cruciver.puzzle import parse_puzzle
from cruciver.solver import BPConfig, SolveOptions, SolveReport
from cruciver.config import ConfigError


def doc_1x2(clue, solution, source="alpha"):
    return (
        f"ROWS 1\nCOLS 2\nSOURCE {source}\nGRID\n..\nACROSS\n"
        f"A1\t0,0\t2\t{clue}\nSOLUTION\n{solution}\n"
    )


DOC_2X2 = """ROWS 2
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
RG
AX
"""


class TestMetricsType:
    def test_bounds_enforced(self):
        with pytest.raises(ValueError):
            Metrics(101.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            Metrics(0.0, -1.0, 0.0)

    def test_correct_cannot_exceed_inserted(self):
        with pytest.raises(ValueError, match="exceed"):
            Metrics(0.0, 50.0, 25.0)


class TestScoreSolution:
    def test_perfect_fill(self):
        puzzle = parse_puzzle(DOC_2X2)
        metrics = score_grid(("RG", "AX"), puzzle)
        assert (metrics.words_correct, metrics.letters_correct, metrics.letters_inserted) == (
            100.0,
            100.0,
            100.0,
        )

    def test_empty_fill(self):
        puzzle = parse_puzzle(DOC_2X2)
        metrics = score_grid(("..", ".."), puzzle)
        assert (metrics.words_correct, metrics.letters_correct, metrics.letters_inserted) == (
            0.0,
            0.0,
            0.0,
        )

    def test_hand_counted_partial_fill(self):
        # 1 of 4 words correct (A1=RG), 3 of 4 cells filled, 2 correct.
        puzzle = parse_puzzle(DOC_2X2)
        metrics = score_grid(("RG", "Z."), puzzle)
        assert metrics.words_correct == 25.0
        assert metrics.letters_correct == 50.0
        assert metrics.letters_inserted == 75.0

    def test_missing_solution_is_error(self):
        doc = DOC_2X2.split("SOLUTION")[0]
        puzzle = parse_puzzle(doc)
        with pytest.raises(ValueError, match="no solution"):
            score_grid(("RG", "AX"), puzzle)

    def test_takes_solve_report(self):
        puzzle = parse_puzzle(DOC_2X2)
        report = SolveReport(puzzle, ("RG", "AX"), (), 0, 0.0, None)
        assert score_solution(report, puzzle).words_correct == 100.0


class TestChallengeScore:
    def test_formula_115(self):
        metrics = Metrics(100.0, 100.0, 100.0)
        score = challenge_score(metrics, elapsed=600, limit=600, base_max=100)
        assert score.base == 100.0
        assert score.time_bonus == 0.0
        assert score.perfection_bonus == 15.0
        assert score.total == 115.0

    def test_formula_132_5(self):
        metrics = Metrics(100.0, 100.0, 100.0)
        score = challenge_score(metrics, elapsed=600, limit=1200, base_max=110)
        assert score.base == 110.0
        assert score.time_bonus == 7.5
        assert score.perfection_bonus == 15.0
        assert score.total == 132.5

    def test_zero_words_at_limit(self):
        metrics = Metrics(0.0, 10.0, 50.0)
        score = challenge_score(metrics, elapsed=600, limit=600)
        assert score.total == 0.0

    def test_over_limit_forfeits_bonuses(self):
        metrics = Metrics(100.0, 100.0, 100.0)
        score = challenge_score(metrics, elapsed=700, limit=600)
        assert score.total == score.base == 100.0

    def test_monotone_in_words_and_time(self):
        previous = -1.0
        for words in range(0, 101, 10):
            metrics = Metrics(float(words), 0.0, 0.0)
            total = challenge_score(metrics, 300, 600).total
            assert total >= previous
            previous = total
        previous = float("inf")
        for elapsed in range(0, 1300, 100):
            metrics = Metrics(100.0, 100.0, 100.0)
            total = challenge_score(metrics, elapsed, 600).total
            assert total <= previous
            previous = total


class FakeEngineConfig:
    def __init__(self, experts):
        self.experts = experts


class FakeEngine:
    """Duck-typed engine over static experts for harness tests."""

    def __init__(self, experts, lexicon=None):
        self.experts = {e.expert_id: e for e in experts}
        self.weights = WeightTable.uniform(list(self.experts))
        self.lexicon = lexicon
        self.config = FakeEngineConfig(tuple(sorted(self.experts)))

    def active_experts(self, subset=None):
        ids = self.config.experts if subset is None else subset
        unknown = set(ids) - set(self.experts)
        if unknown:
            raise ConfigError(f"unknown expert ids: {sorted(unknown)}")
        return [self.experts[eid] for eid in sorted(ids)]

    def solve_options(self, **overrides):
        options = SolveOptions(lexicon=self.lexicon, bp=BPConfig(iterations=4))
        for key, value in overrides.items():
            setattr(options, key, value)
        return options


def write_puzzles(tmp_path, docs):
    directory = tmp_path / "puzzles"
    directory.mkdir()
    for name, doc in docs.items():
        (directory / name).write_text(doc, encoding="utf-8")
    return directory


class TestRunTestset:
    def test_single_perfect_puzzle(self, tmp_path):
        directory = write_puzzles(tmp_path, {"a.xw": doc_1x2("saison", "ET")})
        engine = FakeEngine([StaticExpert("stub", {("saison", 2): {"ET": 1.0}})])
        table = run_testset(directory, engine)
        assert len(table.rows) == 2  # alpha + ALL
        row = table.rows[0]
        assert (row.source, row.puzzles) == ("alpha", 1)
        assert (row.words_correct, row.letters_correct, row.letters_inserted) == (
            100.0,
            100.0,
            100.0,
        )

    def test_mean_of_full_and_zero(self, tmp_path):
        directory = write_puzzles(
            tmp_path,
            {
                "a.xw": doc_1x2("connue", "ET"),
                "b.xw": doc_1x2("inconnue", "TE"),
            },
        )
        engine = FakeEngine([StaticExpert("stub", {("connue", 2): {"ET": 1.0}})])
        table = run_testset(directory, engine)
        assert table.rows[0].words_correct == 50.0
        assert table.overall().words_correct == 50.0

    def test_two_sources_hand_aggregated(self, tmp_path):
        directory = write_puzzles(
            tmp_path,
            {
                "a1.xw": doc_1x2("c1", "ET", source="alpha"),
                "a2.xw": doc_1x2("c2", "TE", source="alpha"),
                "b1.xw": doc_1x2("c3", "ON", source="beta"),
            },
        )
        engine = FakeEngine(
            [StaticExpert("stub", {("c1", 2): {"ET": 1.0}, ("c3", 2): {"ON": 1.0}})]
        )
        table = run_testset(directory, engine)
        per = {name: m for name, _, m in table.per_puzzle}
        # independent aggregation of the same per-puzzle numbers
        alpha_mean = (per["a1.xw"].words_correct + per["a2.xw"].words_correct) / 2
        rows = {r.source: r for r in table.rows}
        assert rows["alpha"].words_correct == pytest.approx(alpha_mean)
        assert rows["beta"].words_correct == per["b1.xw"].words_correct
        expected_all = (
            per["a1.xw"].words_correct
            + per["a2.xw"].words_correct
            + per["b1.xw"].words_correct
        ) / 3
        assert rows["ALL"].words_correct == pytest.approx(expected_all)

    def test_unreadable_puzzle_skipped_and_counted(self, tmp_path, caplog):
        directory = write_puzzles(
            tmp_path,
            {
                "good.xw": doc_1x2("c1", "ET"),
                "bad.xw": "ROWS zero\nnot a puzzle",
                "nosol.xw": doc_1x2("c1", "ET").split("SOLUTION")[0],
            },
        )
        engine = FakeEngine([StaticExpert("stub", {("c1", 2): {"ET": 1.0}})])
        with caplog.at_level("WARNING"):
            table = run_testset(directory, engine)
        assert len(table.skipped) == 2
        assert table.overall().puzzles == 1

    def test_aggregation_order_independent(self, tmp_path):
        docs = {
            f"p{i}.xw": doc_1x2(f"c{i}", "ET", source="s" + str(i % 2))
            for i in range(5)
        }
        directory = write_puzzles(tmp_path, docs)
        engine = FakeEngine(
            [StaticExpert("stub", {(f"c{i}", 2): {"ET": 1.0} for i in range(3)})]
        )
        first = run_testset(directory, engine)
        second = run_testset(directory, engine)
        assert first.rows == second.rows


class TestRunAblation:
    def _engine_and_dir(self, tmp_path):
        directory = write_puzzles(
            tmp_path,
            {
                "a.xw": doc_1x2("seulement alpha", "ET"),
                "b.xw": doc_1x2("seulement beta", "TE"),
            },
        )
        alpha = StaticExpert("alpha", {("seulement alpha", 2): {"ET": 1.0}})
        beta = StaticExpert("beta", {("seulement beta", 2): {"TE": 1.0}})
        return FakeEngine([alpha, beta]), directory

    def test_full_row_equals_plain_testset(self, tmp_path):
        engine, directory = self._engine_and_dir(tmp_path)
        subsets = [("no-beta", ("alpha",))]
        table = run_ablation(directory, engine, subsets)
        plain = run_testset(directory, engine)
        full_row = table.rows[0]
        assert full_row.name == "full"
        assert full_row.words_correct == plain.overall().words_correct
        assert full_row.letters_correct == plain.overall().letters_correct
        assert table.tables["full"].rows == plain.rows

    def test_disabling_sole_knower_strictly_drops(self, tmp_path):
        engine, directory = self._engine_and_dir(tmp_path)
        table = run_ablation(directory, engine, [("no-beta", ("alpha",))])
        rows = {r.name: r for r in table.rows}
        assert rows["full"].word_drop is None
        assert rows["no-beta"].words_correct < rows["full"].words_correct
        assert rows["no-beta"].word_drop == pytest.approx(
            rows["full"].words_correct - rows["no-beta"].words_correct
        )

    def test_identical_subset_has_zero_drop(self, tmp_path):
        engine, directory = self._engine_and_dir(tmp_path)
        table = run_ablation(directory, engine, [("again", ("alpha", "beta"))])
        rows = {r.name: r for r in table.rows}
        assert rows["again"].word_drop == 0.0

    def test_unknown_expert_id_rejected(self, tmp_path):
        engine, directory = self._engine_and_dir(tmp_path)
        with pytest.raises(ConfigError, match="unknown expert"):
            run_ablation(directory, engine, [("bad", ("gamma",))])

    def test_duplicate_subset_names_rejected(self, tmp_path):
        engine, directory = self._engine_and_dir(tmp_path)
        with pytest.raises(ConfigError, match="duplicate"):
            run_ablation(
                directory, engine, [("x", ("alpha",)), ("x", ("beta",))]
            )


class TestParseSubsets:
    def test_parse(self):
        text = "full = a,b\nno-b = a\n# comment\n"
        subsets = parse_subsets(text, ("a", "b"))
        assert subsets == [("full", ("a", "b")), ("no-b", ("a",))]

    def test_unknown_id(self):
        with pytest.raises(ConfigError, match="unknown expert"):
            parse_subsets("x = z\n", ("a",))

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="name = ids"):
            parse_subsets("just words\n", ("a",))


class TestReportFiles:
    def test_csv_and_figure_written_alongside(self, tmp_path):
        directory = write_puzzles(tmp_path, {"a.xw": doc_1x2("c1", "ET")})
        engine = FakeEngine([StaticExpert("stub", {("c1", 2): {"ET": 1.0}})])
        table = run_testset(directory, engine)
        from cruciver.report import write_eval_report

        csv_file, figure = write_eval_report(table, tmp_path / "out" / "eval.csv")
        assert csv_file.exists() and figure.exists()
        assert figure.suffix == ".png" and figure.stat().st_size > 0
        content = csv_file.read_text(encoding="utf-8").splitlines()
        assert content[0] == "source,puzzles,words_correct,letters_correct,letters_inserted"
        assert content[1] == "alpha,1,100.00,100.00,100.00"

    def test_ablation_report_files(self, tmp_path):
        directory = write_puzzles(tmp_path, {"a.xw": doc_1x2("c1", "ET")})
        engine = FakeEngine([StaticExpert("stub", {("c1", 2): {"ET": 1.0}})])
        table = run_ablation(directory, engine, [("solo", ("stub",))])
        from cruciver.report import write_ablation_report

        csv_file, figure = write_ablation_report(table, tmp_path / "ablation.csv")
        lines = csv_file.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "configuration,words_correct,letters_correct,word_drop"
        assert lines[1].startswith("full,") and lines[1].endswith(",-")
        assert figure.exists()
