"""Key-value engine configuration and expert assembly.

Configuration files are ``key = value`` lines (``#`` comments allowed);
relative paths resolve against the file's directory::

    experts = cluedb,similarity,kg,lexicon,rulebased,websearch
    cluedb.path = clues.tsv
    lexicon.path = lexicon.tsv
    kg.path = graph.kg
    websearch.snippets = snippets
    websearch.stoplist = stoplist.txt
    weights.path = weights.txt
    bp.iterations = 25
    bp.damping = 0.5
    bp.epsilon = 1e-6
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .experts import (
    ClueDBExpert,
    Expert,
    KnowledgeGraphExpert,
    Lexicon,
    LexiconExpert,
    RuleBasedExpert,
    SimilarityExpert,
    WebSearchExpert,
    FixtureBackend,
    build_similarity_index,
    load_knowledge_graph,
    load_lexicon,
    load_markers,
    load_stoplist,
)
from .experts.cluedb import DEFAULT_TIERS
from .experts.similarity import DEFAULT_K, DEFAULT_TEMPERATURE
from .merge import WeightTable, load_weight_table
from .puzzle import ClueDB, load_clue_db
from .solver import BPConfig, SolveOptions

log = logging.getLogger("cruciver.config")

KNOWN_EXPERTS = ("cluedb", "similarity", "kg", "lexicon", "rulebased", "websearch")

_KNOWN_KEYS = {
    "experts",
    "cluedb.path",
    "cluedb.tiers",
    "lexicon.path",
    "kg.path",
    "kg.k",
    "kg.temperature",
    "websearch.snippets",
    "websearch.stoplist",
    "websearch.max_results",
    "rulebased.markers",
    "weights.path",
    "bp.iterations",
    "bp.damping",
    "bp.epsilon",
    "similarity.k",
    "similarity.temperature",
    "bus.deadline_ms",
}


class ConfigError(ValueError):
    pass


def parse_key_values(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        values[key.strip()] = value.strip()
    return values


@dataclass
class EngineConfig:
    experts: tuple[str, ...] = KNOWN_EXPERTS
    cluedb_path: Path | None = None
    lexicon_path: Path | None = None
    kg_path: Path | None = None
    websearch_snippets: Path | None = None
    websearch_stoplist: Path | None = None
    websearch_max_results: int = 10
    rulebased_markers: Path | None = None
    weights_path: Path | None = None
    bp: BPConfig = field(default_factory=BPConfig)
    cluedb_tiers: tuple[float, float, float] = DEFAULT_TIERS
    similarity_k: int = DEFAULT_K
    similarity_temperature: float = DEFAULT_TEMPERATURE
    kg_k: int = DEFAULT_K
    kg_temperature: float = DEFAULT_TEMPERATURE
    deadline_ms: float = 5000.0

    def __post_init__(self):
        unknown = set(self.experts) - set(KNOWN_EXPERTS)
        if unknown:
            raise ConfigError(f"unknown expert ids: {sorted(unknown)}")


def load_config(path) -> EngineConfig:
    path = Path(path)
    values = parse_key_values(path.read_text("utf-8"))
    unknown = set(values) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    base = path.parent

    def path_of(key: str) -> Path | None:
        if key not in values:
            return None
        return (base / values[key]).resolve()

    def floats(key: str, default: float) -> float:
        return float(values[key]) if key in values else default

    def ints(key: str, default: int) -> int:
        return int(values[key]) if key in values else default

    experts = KNOWN_EXPERTS
    if "experts" in values:
        experts = tuple(e.strip() for e in values["experts"].split(",") if e.strip())
    tiers = DEFAULT_TIERS
    if "cluedb.tiers" in values:
        parts = [float(v) for v in values["cluedb.tiers"].split(",")]
        if len(parts) != 3:
            raise ConfigError("cluedb.tiers needs three comma-separated weights")
        tiers = tuple(parts)

    return EngineConfig(
        experts=experts,
        cluedb_path=path_of("cluedb.path"),
        lexicon_path=path_of("lexicon.path"),
        kg_path=path_of("kg.path"),
        websearch_snippets=path_of("websearch.snippets"),
        websearch_stoplist=path_of("websearch.stoplist"),
        websearch_max_results=ints("websearch.max_results", 10),
        rulebased_markers=path_of("rulebased.markers"),
        weights_path=path_of("weights.path"),
        bp=BPConfig(
            iterations=ints("bp.iterations", 25),
            damping=floats("bp.damping", 0.5),
            epsilon=floats("bp.epsilon", 1e-6),
        ),
        cluedb_tiers=tiers,
        similarity_k=ints("similarity.k", DEFAULT_K),
        similarity_temperature=floats("similarity.temperature", DEFAULT_TEMPERATURE),
        kg_k=ints("kg.k", DEFAULT_K),
        kg_temperature=floats("kg.temperature", DEFAULT_TEMPERATURE),
        deadline_ms=floats("bus.deadline_ms", 5000.0),
    )


@dataclass
class Engine:
    """Constructed experts plus everything needed to run solves."""

    config: EngineConfig
    experts: dict[str, Expert]
    lexicon: Lexicon | None
    weights: WeightTable
    clue_db: ClueDB | None

    def active_experts(self, subset: tuple[str, ...] | None = None) -> list[Expert]:
        ids = self.config.experts if subset is None else subset
        unknown = set(ids) - set(self.experts)
        if unknown:
            raise ConfigError(f"unknown expert ids: {sorted(unknown)}")
        return [self.experts[eid] for eid in sorted(ids)]

    def solve_options(self, **overrides) -> SolveOptions:
        options = SolveOptions(
            lexicon=self.lexicon,
            bp=self.config.bp,
            deadline_ms=self.config.deadline_ms,
        )
        for key, value in overrides.items():
            setattr(options, key, value)
        return options


def build_engine(config: EngineConfig) -> Engine:
    """Instantiate the configured experts (indices built eagerly)."""
    clue_db = None
    if config.cluedb_path is not None:
        clue_db = load_clue_db(config.cluedb_path)
    lexicon = None
    if config.lexicon_path is not None:
        lexicon = load_lexicon(config.lexicon_path)

    experts: dict[str, Expert] = {}
    if "cluedb" in config.experts:
        if clue_db is None:
            raise ConfigError("cluedb expert requires cluedb.path")
        experts["cluedb"] = ClueDBExpert(clue_db, config.cluedb_tiers)
    similarity = None
    if "similarity" in config.experts:
        if clue_db is None:
            raise ConfigError("similarity expert requires cluedb.path")
        index = build_similarity_index(clue_db)
        similarity = SimilarityExpert(
            index, k=config.similarity_k, temperature=config.similarity_temperature
        )
        experts["similarity"] = similarity
    if "kg" in config.experts:
        if config.kg_path is None:
            raise ConfigError("kg expert requires kg.path")
        graph = load_knowledge_graph(config.kg_path)
        experts["kg"] = KnowledgeGraphExpert(
            graph, k=config.kg_k, temperature=config.kg_temperature
        )
    if "lexicon" in config.experts:
        if lexicon is None:
            raise ConfigError("lexicon expert requires lexicon.path")
        experts["lexicon"] = LexiconExpert(lexicon)
    if "rulebased" in config.experts:
        markers = load_markers(config.rulebased_markers)
        experts["rulebased"] = RuleBasedExpert(markers, delegate=similarity)
    if "websearch" in config.experts:
        if config.websearch_snippets is None:
            raise ConfigError("websearch expert requires websearch.snippets")
        stoplist = frozenset()
        if config.websearch_stoplist is not None:
            stoplist = load_stoplist(config.websearch_stoplist)
        experts["websearch"] = WebSearchExpert(
            FixtureBackend(config.websearch_snippets),
            stoplist,
            max_results=config.websearch_max_results,
        )

    if config.weights_path is not None:
        weights = load_weight_table(config.weights_path)
        missing = set(config.experts) - set(weights.expert_ids())
        if missing:
            raise ConfigError(f"weight table lacks experts {sorted(missing)}")
    else:
        # Empty expert sets still need a valid table; it is never consulted.
        weights = WeightTable.uniform(config.experts or KNOWN_EXPERTS)
    return Engine(config, experts, lexicon, weights, clue_db)


def load_engine(path) -> Engine:
    return build_engine(load_config(path))
