"""Delimited report files and the figures rendered alongside them.

Whenever the harness writes a CSV table it also renders a PNG chart of
the same numbers next to it (same path, ``.png`` suffix), so eval and
ablation runs leave both a machine-readable and a visual artifact.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import AblationTable, EvalTable

log = logging.getLogger("cruciver.report")

EVAL_HEADER = ("source", "puzzles", "words_correct", "letters_correct", "letters_inserted")
ABLATION_HEADER = ("configuration", "words_correct", "letters_correct", "word_drop")


def format_percent(value: float) -> str:
    return f"{value:.2f}"


def eval_csv_rows(table: EvalTable) -> list[tuple[str, ...]]:
    rows = [EVAL_HEADER]
    for row in table.rows:
        rows.append(
            (
                row.source,
                str(row.puzzles),
                format_percent(row.words_correct),
                format_percent(row.letters_correct),
                format_percent(row.letters_inserted),
            )
        )
    return rows


def ablation_csv_rows(table: AblationTable) -> list[tuple[str, ...]]:
    rows = [ABLATION_HEADER]
    for row in table.rows:
        drop = "-" if row.word_drop is None else format_percent(row.word_drop)
        rows.append(
            (
                row.name,
                format_percent(row.words_correct),
                format_percent(row.letters_correct),
                drop,
            )
        )
    return rows


def write_csv(path, rows: list[tuple[str, ...]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        csv.writer(handle).writerows(rows)
    return path


def figure_path_for(csv_path) -> Path:
    return Path(csv_path).with_suffix(".png")


def render_eval_figure(table: EvalTable, path) -> Path:
    """Grouped bars of the three percentages per source."""
    path = Path(path)
    sources = [row.source for row in table.rows]
    series = {
        "words correct": [row.words_correct for row in table.rows],
        "letters correct": [row.letters_correct for row in table.rows],
        "letters inserted": [row.letters_inserted for row in table.rows],
    }
    fig, ax = plt.subplots(figsize=(max(4.0, 1.8 * len(sources)), 3.2))
    width = 0.26
    for offset, (label, values) in enumerate(series.items()):
        positions = [i + (offset - 1) * width for i in range(len(sources))]
        ax.bar(positions, values, width=width, label=label)
    ax.set_xticks(range(len(sources)))
    ax.set_xticklabels(sources, rotation=20, ha="right")
    ax.set_ylabel("percent")
    ax.set_ylim(0, 105)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_ablation_figure(table: AblationTable, path) -> Path:
    """Words/letters accuracy per configuration."""
    path = Path(path)
    names = [row.name for row in table.rows]
    words = [row.words_correct for row in table.rows]
    letters = [row.letters_correct for row in table.rows]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.6 * len(names)), 3.2))
    width = 0.38
    ax.bar([i - width / 2 for i in range(len(names))], words, width=width, label="words correct")
    ax.bar([i + width / 2 for i in range(len(names))], letters, width=width, label="letters correct")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=20, ha="right")
    ax.set_ylabel("percent")
    ax.set_ylim(0, 105)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_eval_report(table: EvalTable, csv_path) -> tuple[Path, Path]:
    """CSV plus the PNG chart alongside."""
    csv_file = write_csv(csv_path, eval_csv_rows(table))
    figure = render_eval_figure(table, figure_path_for(csv_file))
    return csv_file, figure


def write_ablation_report(table: AblationTable, csv_path) -> tuple[Path, Path]:
    csv_file = write_csv(csv_path, ablation_csv_rows(table))
    figure = render_ablation_figure(table, figure_path_for(csv_file))
    return csv_file, figure
