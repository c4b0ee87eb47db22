"""Crossword solving engine.

Pipeline: expert candidate generation over a pub/sub bus, length-bucketed
weighted list merging, loopy belief propagation over the grid constraint
network, char-based letter fixing and a two-phase word fill, plus an
evaluation and competition-scoring harness.
"""

__version__ = "0.1.0"

from .puzzle import (
    Direction,
    Grid,
    Puzzle,
    Slot,
    Crossing,
    ClueDB,
    ClueRecord,
    PuzzleFormatError,
    crossings,
    extract_slots,
    load_clue_db,
    load_puzzle,
    parse_puzzle,
    serialize_puzzle,
)
from .text import normalize_answer, UnrepresentableError
from .merge import (
    TrainingPair,
    WeightTable,
    bucket_for,
    filter_list,
    load_weight_table,
    merge_lists,
    save_weight_table,
    train_weights,
)
from .metrics import ChallengeScore, Metrics, challenge_score, score_grid
from .solver import (
    BPConfig,
    ConstraintNetwork,
    FillState,
    LetterMarginals,
    SolveOptions,
    SolveReport,
    bp_rerank,
    build_letter_marginals,
    build_network,
    char_probability,
    fix_letters,
    greedy_word_fill,
    implicit_fill,
    letter_marginal,
    render_report,
    solve,
)
from .bus import (
    BusTimeoutError,
    CandidateGatherer,
    Envelope,
    ExpertResponder,
    GatherPolicy,
    InProcessTransport,
    MessageBus,
    PermutingTransport,
)
