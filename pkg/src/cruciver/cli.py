"""Command-line interface.

Subcommands: ``solve``, ``eval``, ``ablate``, ``train-weights`` and
``score``.  Evaluation and ablation runs write a CSV table and render a
PNG chart alongside it when ``--csv`` is given.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import EngineConfig, build_engine, load_engine
from .harness import parse_subsets, run_ablation, run_testset
from .merge import TrainingPair, save_weight_table, train_weights
from .metrics import Metrics, challenge_score
from .puzzle import load_clue_db, load_puzzle
from .solver import render_report, solve

log = logging.getLogger("cruciver")


def _engine(config_path: str | None):
    if config_path is None:
        return build_engine(EngineConfig(experts=()))
    return load_engine(config_path)


def _cmd_solve(args) -> int:
    engine = _engine(args.config)
    puzzle = load_puzzle(args.puzzle)
    subset = tuple(args.experts.split(",")) if args.experts else None
    report = solve(
        puzzle,
        engine.active_experts(subset),
        engine.weights,
        engine.solve_options(),
    )
    text = render_report(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        log.info("report written to %s", args.out)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_eval(args) -> int:
    engine = _engine(args.config)
    table = run_testset(args.directory, engine)
    from .report import eval_csv_rows, write_eval_report

    rows = eval_csv_rows(table)
    if args.csv:
        csv_file, figure = write_eval_report(table, args.csv)
        log.info("wrote %s and %s", csv_file, figure)
    for row in rows:
        sys.stdout.write(",".join(row) + "\n")
    if table.skipped:
        sys.stdout.write(f"# skipped {len(table.skipped)} unreadable puzzle(s)\n")
    return 0


def _cmd_ablate(args) -> int:
    engine = _engine(args.config)
    subsets = parse_subsets(
        Path(args.subsets).read_text("utf-8"), tuple(engine.experts)
    )
    table = run_ablation(args.directory, engine, subsets)
    from .report import ablation_csv_rows, write_ablation_report

    if args.csv:
        csv_file, figure = write_ablation_report(table, args.csv)
        log.info("wrote %s and %s", csv_file, figure)
    for row in ablation_csv_rows(table):
        sys.stdout.write(",".join(row) + "\n")
    return 0


def _cmd_train_weights(args) -> int:
    engine = _engine(args.config)
    db = load_clue_db(args.corpus)
    pairs = [TrainingPair(rec.clue, rec.answer) for rec in db.records]
    experts = engine.active_experts()
    table = train_weights(pairs, experts)
    save_weight_table(table, args.out)
    log.info("trained weights written to %s", args.out)
    return 0


def _read_metrics(path: str) -> Metrics:
    values: dict[str, float] = {}
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        for sep in ("\t", "="):
            key, found, value = line.partition(sep)
            if found:
                key, value = key.strip(), value.strip()
                if key in ("words_correct", "letters_correct", "letters_inserted"):
                    try:
                        values[key] = float(value)
                    except ValueError:
                        pass
                break
    missing = {"words_correct", "letters_correct", "letters_inserted"} - set(values)
    if missing:
        raise ValueError(f"{path}: missing metric lines {sorted(missing)}")
    return Metrics(**values)


def _cmd_score(args) -> int:
    metrics = _read_metrics(args.metrics)
    result = challenge_score(metrics, args.elapsed, args.limit, args.base_max)
    sys.stdout.write(f"base\t{result.base:.2f}\n")
    sys.stdout.write(f"time_bonus\t{result.time_bonus:.2f}\n")
    sys.stdout.write(f"perfection_bonus\t{result.perfection_bonus:.2f}\n")
    sys.stdout.write(f"total\t{result.total:.2f}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cruciver", description="Crossword solving engine"
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one puzzle file")
    p_solve.add_argument("puzzle")
    p_solve.add_argument("--config")
    p_solve.add_argument("--experts", help="comma-separated expert ids")
    p_solve.add_argument("--out", help="write the report here instead of stdout")
    p_solve.set_defaults(func=_cmd_solve)

    p_eval = sub.add_parser("eval", help="evaluate a directory of puzzles")
    p_eval.add_argument("directory")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--csv", help="write CSV (and a PNG chart alongside)")
    p_eval.set_defaults(func=_cmd_eval)

    p_ablate = sub.add_parser("ablate", help="expert ablation study")
    p_ablate.add_argument("directory")
    p_ablate.add_argument("--config", required=True)
    p_ablate.add_argument("--subsets", required=True)
    p_ablate.add_argument("--csv", help="write CSV (and a PNG chart alongside)")
    p_ablate.set_defaults(func=_cmd_ablate)

    p_train = sub.add_parser("train-weights", help="train merger weights on a corpus")
    p_train.add_argument("corpus")
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--out", required=True)
    p_train.set_defaults(func=_cmd_train_weights)

    p_score = sub.add_parser("score", help="competition score from a metrics file")
    p_score.add_argument("--metrics", required=True)
    p_score.add_argument("--elapsed", type=float, required=True)
    p_score.add_argument("--limit", type=float, required=True)
    p_score.add_argument("--base-max", type=float, default=100.0)
    p_score.set_defaults(func=_cmd_score)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
