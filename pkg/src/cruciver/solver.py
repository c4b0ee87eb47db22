"""Constraint network, belief-propagation reranking and grid filling.

The grid filler is char-based: after BP reranks every slot's candidate
list for global consistency, per-cell letter distributions are built in
both directions and a letter is fixed wherever the directional product
clears one of two confidence criteria (a 99.99% product with agreeing
argmaxes, or a 99% product with both directions above 90%).  Remaining
slots are filled greedily with the most probable word that breaks no
fixed letter, then a lexicon-backed implicit pass handles the leftovers.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .bus import (
    TOPIC_STATUS,
    CandidateGatherer,
    Envelope,
    ExpertResponder,
    GatherPolicy,
    MessageBus,
    Transport,
    encode_status,
)
from .experts.base import CandidateList, Expert, list_from_scores
from .experts.lexicon import Lexicon, WILDCARD, lexicon_generate
from .merge import WeightTable, filter_list, merge_lists
from .metrics import Metrics, score_grid
from .puzzle import BLOCK, Crossing, Puzzle, Slot, crossings
from .text import ALPHABET, ALPHABET_SIZE, LETTER_INDEX

log = logging.getLogger("cruciver.solver")

UNFILLED = "."

EQ2_PRODUCT = 0.9999
EQ3_PRODUCT = 0.99
EQ3_DIRECTIONAL = 0.9


@dataclass(frozen=True)
class BPConfig:
    iterations: int = 25
    damping: float = 0.5
    epsilon: float = 1e-6

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must be in [0, 1)")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")


@dataclass(frozen=True)
class SlotState:
    """A slot's candidate list and where it came from."""

    slot: Slot
    clist: CandidateList | None  # None means uniform over the alphabet
    source: str  # merged | lexicon | uniform

    def top_probability(self) -> float:
        if self.clist is None or not self.clist.candidates:
            return 0.0
        return self.clist.candidates[0].probability


@dataclass(frozen=True)
class ConstraintNetwork:
    puzzle: Puzzle
    states: dict[str, SlotState]
    crossings: tuple[Crossing, ...]

    def state(self, slot_id: str) -> SlotState:
        return self.states[slot_id]


def build_network(
    puzzle: Puzzle,
    merged: dict[str, CandidateList],
    lexicon: Lexicon | None = None,
) -> ConstraintNetwork:
    """Attach candidate lists to slots, with lexicon fallback.

    Slots whose merged list is empty fall back to the frequency-weighted
    lexicon words of their length; if the lexicon yields nothing either,
    the slot stands in as a uniform distribution over the alphabet.
    """
    states: dict[str, SlotState] = {}
    for slot in puzzle.slots:
        clist = merged.get(slot.id)
        if clist is not None and clist.candidates:
            states[slot.id] = SlotState(slot, clist, "merged")
            continue
        fallback = None
        if lexicon is not None:
            fallback = lexicon_generate(WILDCARD * slot.length, lexicon, clue_id=slot.id)
        if fallback is not None and fallback.candidates:
            states[slot.id] = SlotState(slot, fallback, "lexicon")
        else:
            states[slot.id] = SlotState(slot, None, "uniform")
    return ConstraintNetwork(puzzle, states, tuple(crossings(puzzle)))


def uniform_distribution() -> np.ndarray:
    return np.full(ALPHABET_SIZE, 1.0 / ALPHABET_SIZE)


def letter_marginal(
    clist: CandidateList | None, position: int, epsilon: float = 1e-6
) -> np.ndarray:
    """Distribution of the letter at ``position``: sum of word masses.

    Floored at ``epsilon`` and renormalized so downstream products never
    hit exact zeros.
    """
    if clist is None or not clist.candidates:
        return uniform_distribution()
    if not 0 <= position < len(clist.candidates[0].answer):
        raise ValueError("position outside the answer length")
    dist = np.zeros(ALPHABET_SIZE)
    for cand in clist.candidates:
        dist[LETTER_INDEX[cand.answer[position]]] += cand.probability
    if epsilon > 0.0:
        dist = np.maximum(dist, epsilon)
    return dist / dist.sum()


# --- belief propagation -----------------------------------------------------


class _SlotVars:
    """Candidate letters as an index matrix for vectorized message passing."""

    def __init__(self, clist: CandidateList):
        self.answers = [c.answer for c in clist.candidates]
        self.prior = np.array([c.probability for c in clist.candidates])
        self.letters = np.array(
            [[LETTER_INDEX[ch] for ch in answer] for answer in self.answers]
        )
        # (other slot id, position in this slot) for each crossing edge.
        self.in_edges: list[tuple[str, int]] = []


def _bp_edges(network: ConstraintNetwork, variables: dict[str, _SlotVars]):
    for crossing in network.crossings:
        if crossing.across is None or crossing.down is None:
            continue
        a_id, a_pos = crossing.across
        d_id, d_pos = crossing.down
        if a_id not in variables or d_id not in variables:
            continue
        variables[a_id].in_edges.append((d_id, a_pos))
        variables[d_id].in_edges.append((a_id, d_pos))


def _message(
    src: _SlotVars,
    exclude: str | None,
    out_pos: int,
    messages: dict[tuple[str, str], np.ndarray],
    src_id: str,
    epsilon: float,
) -> np.ndarray:
    weights = src.prior.copy()
    for other_id, pos in src.in_edges:
        if other_id == exclude:
            continue
        weights = weights * messages[(other_id, src_id)][src.letters[:, pos]]
    out = np.zeros(ALPHABET_SIZE)
    np.add.at(out, src.letters[:, out_pos], weights)
    if epsilon > 0.0:
        out = np.maximum(out, epsilon)
    total = out.sum()
    if total == 0.0:
        return uniform_distribution()
    return out / total


def bp_rerank(network: ConstraintNetwork, config: BPConfig) -> ConstraintNetwork:
    """Synchronous damped sum-product over the slot/cell constraint graph.

    Messages between crossing slots are letter distributions at the
    shared cell; after the configured rounds each slot's list is
    reweighted by its incoming messages, renormalized and re-sorted.
    """
    if config.iterations == 0:
        return network
    variables = {
        slot_id: _SlotVars(state.clist)
        for slot_id, state in network.states.items()
        if state.clist is not None and state.clist.candidates
    }
    _bp_edges(network, variables)
    # (src, dst, position in src of the shared cell); in_edges of src list
    # the crossing partners together with that position.
    edges: list[tuple[str, str, int]] = []
    for slot_id, var in variables.items():
        for other_id, pos in var.in_edges:
            edges.append((slot_id, other_id, pos))
    messages = {
        (src, dst): uniform_distribution() for src, dst, _ in edges
    }
    for _ in range(config.iterations):
        fresh = {}
        for src, dst, out_pos in edges:
            computed = _message(
                variables[src], dst, out_pos, messages, src, config.epsilon
            )
            damped = config.damping * messages[(src, dst)] + (1.0 - config.damping) * computed
            fresh[(src, dst)] = damped / damped.sum()
        messages = fresh

    states = dict(network.states)
    for slot_id, var in variables.items():
        weights = var.prior.copy()
        for other_id, pos in var.in_edges:
            weights = weights * messages[(other_id, slot_id)][var.letters[:, pos]]
        total = weights.sum()
        state = network.states[slot_id]
        if total == 0.0:
            log.warning("slot %s: no candidate consistent with constraints", slot_id)
            continue
        scores = {answer: float(w) for answer, w in zip(var.answers, weights)}
        reranked = list_from_scores(
            scores, state.clist.expert_id, state.clist.clue_id,
            confidence=state.clist.confidence,
        )
        states[slot_id] = replace(state, clist=reranked)
    return ConstraintNetwork(network.puzzle, states, network.crossings)


# --- letter marginals and fixing criteria -----------------------------------


@dataclass(frozen=True)
class CellMarginals:
    across: np.ndarray
    down: np.ndarray
    has_across: bool
    has_down: bool


@dataclass(frozen=True)
class LetterMarginals:
    """Per-cell directional letter distributions.

    Blind cells carry the uniform distribution on the absent direction
    for bookkeeping; the fixing criteria treat the absent direction as
    certainty instead.
    """

    cells: dict[tuple[int, int], CellMarginals]


def build_letter_marginals(
    network: ConstraintNetwork, epsilon: float = 1e-6
) -> LetterMarginals:
    cells: dict[tuple[int, int], CellMarginals] = {}
    for crossing in network.crossings:
        across = down = None
        if crossing.across is not None:
            slot_id, pos = crossing.across
            across = letter_marginal(network.state(slot_id).clist, pos, epsilon)
        if crossing.down is not None:
            slot_id, pos = crossing.down
            down = letter_marginal(network.state(slot_id).clist, pos, epsilon)
        cells[crossing.cell] = CellMarginals(
            across if across is not None else uniform_distribution(),
            down if down is not None else uniform_distribution(),
            crossing.across is not None,
            crossing.down is not None,
        )
    return LetterMarginals(cells)


def char_probability(marginals: LetterMarginals, cell: tuple[int, int]) -> np.ndarray:
    """Raw product of the directional distributions (not renormalized).

    An absent direction contributes certainty (ones), matching how the
    fixing criteria treat blind cells.
    """
    cm = marginals.cells[cell]
    product = np.ones(ALPHABET_SIZE)
    if cm.has_across:
        product = product * cm.across
    if cm.has_down:
        product = product * cm.down
    return product


def fix_letters(marginals: LetterMarginals) -> dict[tuple[int, int], str]:
    """Fix high-confidence letters cell by cell.

    A letter is fixed when the directional product exceeds 99.99% with
    both argmaxes agreeing, or exceeds 99% with both directions above
    90%.  Argmax ties break alphabetically; on blind cells the criteria
    reduce to the present direction.
    """
    fixed: dict[tuple[int, int], str] = {}
    for cell, cm in marginals.cells.items():
        dirs = []
        if cm.has_across:
            dirs.append(cm.across)
        if cm.has_down:
            dirs.append(cm.down)
        bests = [int(np.argmax(d)) for d in dirs]
        if len(set(bests)) != 1:
            continue
        best = bests[0]
        product = 1.0
        for d in dirs:
            product *= float(d[best])
        if product > EQ2_PRODUCT:
            fixed[cell] = ALPHABET[best]
        elif product > EQ3_PRODUCT and all(float(d[best]) > EQ3_DIRECTIONAL for d in dirs):
            fixed[cell] = ALPHABET[best]
    return fixed


# --- grid filling -----------------------------------------------------------


@dataclass(frozen=True)
class Placement:
    word: str
    origin: str  # greedy | implicit
    probability: float


@dataclass(frozen=True)
class FillState:
    puzzle: Puzzle
    letters: dict[tuple[int, int], str]
    placed: dict[str, Placement]

    def __post_init__(self):
        for slot_id, placement in self.placed.items():
            slot = self.puzzle.slot_by_id(slot_id)
            for ch, cell in zip(placement.word, slot.cells()):
                if self.letters.get(cell) != ch:
                    raise ValueError(f"placement {slot_id} disagrees with grid letters")

    def unfilled_cells(self) -> list[tuple[int, int]]:
        return [c for c in self.puzzle.grid.open_cells() if c not in self.letters]

    def grid_rows(self) -> tuple[str, ...]:
        rows = []
        for r in range(self.puzzle.grid.rows):
            row = []
            for c in range(self.puzzle.grid.cols):
                if not self.puzzle.grid.is_open(r, c):
                    row.append(BLOCK)
                else:
                    row.append(self.letters.get((r, c), UNFILLED))
            rows.append("".join(row))
        return tuple(rows)

    def pattern_for(self, slot: Slot) -> str:
        return "".join(self.letters.get(cell, WILDCARD) for cell in slot.cells())


def _fits(slot: Slot, word: str, letters: dict[tuple[int, int], str]) -> bool:
    for ch, cell in zip(word, slot.cells()):
        existing = letters.get(cell)
        if existing is not None and existing != ch:
            return False
    return True


def greedy_word_fill(
    network: ConstraintNetwork, fixed: dict[tuple[int, int], str]
) -> FillState:
    """Place the most probable consistent word per slot.

    Slots are processed in descending order of their top candidate's
    probability (puzzle order on ties); fixed letters and earlier
    placements are never overwritten.
    """
    letters = dict(fixed)
    placed: dict[str, Placement] = {}
    ordered = []
    for index, slot in enumerate(network.puzzle.slots):
        state = network.states[slot.id]
        if state.clist is not None and state.clist.candidates:
            ordered.append((index, state))
    ordered.sort(key=lambda item: (-item[1].top_probability(), item[0]))
    for _, state in ordered:
        for cand in state.clist.candidates:
            if _fits(state.slot, cand.answer, letters):
                for ch, cell in zip(cand.answer, state.slot.cells()):
                    letters[cell] = ch
                placed[state.slot.id] = Placement(cand.answer, "greedy", cand.probability)
                break
    return FillState(network.puzzle, letters, placed)


def implicit_fill(state: FillState, lexicon: Lexicon | None) -> FillState:
    """Fill unplaced slots from the lexicon using the determined letters.

    For each unplaced slot the pattern of already-determined letters is
    matched against the lexicon and the most frequent match placed (ties
    alphabetical).  Cells that stay undetermined remain unfilled.
    """
    if lexicon is None:
        return state
    letters = dict(state.letters)
    placed = dict(state.placed)
    for slot in state.puzzle.slots:
        if slot.id in placed:
            continue
        pattern = "".join(letters.get(cell, WILDCARD) for cell in slot.cells())
        matches = lexicon.match(pattern)
        if not matches:
            continue
        total = sum(freq for _, freq in matches)
        word, freq = min(matches, key=lambda wf: (-wf[1], wf[0]))
        for ch, cell in zip(word, slot.cells()):
            letters[cell] = ch
        placed[slot.id] = Placement(word, "implicit", freq / total)
    return FillState(state.puzzle, letters, placed)


# --- end-to-end solve -------------------------------------------------------


@dataclass(frozen=True)
class SlotResult:
    slot_id: str
    word: str | None
    source: str
    probability: float


@dataclass(frozen=True)
class SolveReport:
    puzzle: Puzzle
    grid_rows: tuple[str, ...]
    slot_results: tuple[SlotResult, ...]
    unfilled: int
    wall_seconds: float
    metrics: Metrics | None


@dataclass
class SolveOptions:
    """Everything a solve run needs besides the puzzle and experts.

    Passing a pre-built ``bus`` lets the host subscribe to
    ``solver.status`` (and anything else) before the run; otherwise a
    fresh in-process bus is created over ``transport``.
    """

    lexicon: Lexicon | None = None
    bp: BPConfig = field(default_factory=BPConfig)
    deadline_ms: float = 5000.0
    transport: Transport | None = None
    bus: MessageBus | None = None
    clock: Callable[[], float] = time.perf_counter
    run_id: str = "run"


def _provenance(
    word: str,
    responses: dict[str, CandidateList],
    network_source: str,
) -> str:
    if network_source == "lexicon":
        return "lexicon"
    best: tuple[int, float, str] | None = None
    for expert_id in sorted(responses):
        for rank, cand in enumerate(responses[expert_id].candidates):
            if cand.answer != word:
                continue
            key = (rank, -cand.probability, expert_id)
            if best is None or key < best:
                best = key
            break
    return best[2] if best is not None else network_source


def solve(
    puzzle: Puzzle,
    experts: list[Expert],
    weights: WeightTable,
    options: SolveOptions | None = None,
) -> SolveReport:
    """Run the full pipeline and report the filled grid.

    Fan-out over the bus, merge, filter, network construction, BP
    reranking, letter fixing, greedy word fill and the implicit lexicon
    pass.  Identical inputs (including the injected clock) produce a
    byte-identical report.
    """
    options = options or SolveOptions()
    clock = options.clock
    started = clock()

    bus = options.bus if options.bus is not None else MessageBus(options.transport)
    responders = [ExpertResponder(bus, expert) for expert in experts]
    gatherer = CandidateGatherer(bus, run_id=options.run_id)
    active = frozenset(e.expert_id for e in experts)
    policy = GatherPolicy(options.deadline_ms, required=active)

    clue_slots = [s for s in puzzle.slots if s.clue is not None]
    responses_by_slot: dict[str, dict[str, CandidateList]] = {}
    merged: dict[str, CandidateList] = {}
    for done, slot in enumerate(clue_slots):
        _status(bus, options.run_id, "answering", done / max(1, len(clue_slots)))
        responses = gatherer.request_candidates(slot.clue, slot.length, policy)
        responses_by_slot[slot.id] = responses
        merged_list = merge_lists(responses.values(), weights, slot.length, clue_id=slot.id)
        merged[slot.id] = filter_list(merged_list, slot.length)
    _status(bus, options.run_id, "merging", 1.0)

    network = build_network(puzzle, merged, options.lexicon)
    _status(bus, options.run_id, "bp", 0.0)
    network = bp_rerank(network, options.bp)
    _status(bus, options.run_id, "bp", 1.0)

    marginals = build_letter_marginals(network, options.bp.epsilon)
    fixed = fix_letters(marginals)
    state = greedy_word_fill(network, fixed)
    state = implicit_fill(state, options.lexicon)
    _status(bus, options.run_id, "filling", 1.0)

    for responder in responders:
        responder.close()
    gatherer.close()

    slot_results = []
    for slot in clue_slots:
        placement = state.placed.get(slot.id)
        if placement is None:
            slot_results.append(SlotResult(slot.id, None, "-", 0.0))
            continue
        if placement.origin == "implicit":
            source = "implicit"
        else:
            source = _provenance(
                placement.word,
                responses_by_slot.get(slot.id, {}),
                network.state(slot.id).source,
            )
        slot_results.append(
            SlotResult(slot.id, placement.word, source, placement.probability)
        )

    grid_rows = state.grid_rows()
    metrics = score_grid(grid_rows, puzzle) if puzzle.solution is not None else None
    return SolveReport(
        puzzle=puzzle,
        grid_rows=grid_rows,
        slot_results=tuple(slot_results),
        unfilled=len(state.unfilled_cells()),
        wall_seconds=clock() - started,
        metrics=metrics,
    )


def _status(bus: MessageBus, run_id: str, phase: str, progress: float) -> None:
    bus.publish(
        Envelope(TOPIC_STATUS, run_id, encode_status(run_id, phase, progress), "solver", 0.0)
    )


def render_report(report: SolveReport) -> str:
    """Serialize a report as structured text (grid, slots, metrics, timing)."""
    lines = ["GRID"]
    lines.extend(report.grid_rows)
    lines.append("SLOTS")
    for result in report.slot_results:
        word = result.word if result.word is not None else "-"
        lines.append(
            f"{result.slot_id}\t{word}\t{result.source}\t{result.probability:.6f}"
        )
    lines.append("METRICS")
    if report.metrics is not None:
        lines.append(f"words_correct\t{report.metrics.words_correct:.2f}")
        lines.append(f"letters_correct\t{report.metrics.letters_correct:.2f}")
        lines.append(f"letters_inserted\t{report.metrics.letters_inserted:.2f}")
    lines.append(f"unfilled_cells\t{report.unfilled}")
    lines.append("TIMING")
    lines.append(f"wall_seconds\t{report.wall_seconds:.6f}")
    return "\n".join(lines) + "\n"
