"""Expert candidate generators."""

from .base import (
    Candidate,
    CandidateList,
    Expert,
    StaticExpert,
    empty_list,
    expert_generate,
    list_from_scores,
)
from .cluedb import ClueDBExpert, cluedb_generate
from .encoder import TrigramEncoder, cosine, default_encode
from .kg import (
    Concept,
    KnowledgeGraph,
    KnowledgeGraphExpert,
    kg_generate,
    load_knowledge_graph,
    parse_knowledge_graph,
)
from .lexicon import Lexicon, LexiconExpert, lexicon_generate, load_lexicon
from .rulebased import RuleBasedExpert, load_markers, rulebased_generate
from .similarity import (
    SimilarityExpert,
    SimilarityIndex,
    build_similarity_index,
    similarity_generate,
)
from .websearch import (
    FixtureBackend,
    SearchBackend,
    WebSearchExpert,
    load_stoplist,
    websearch_generate,
)

__all__ = [
    "Candidate",
    "CandidateList",
    "Expert",
    "StaticExpert",
    "empty_list",
    "expert_generate",
    "list_from_scores",
    "ClueDBExpert",
    "cluedb_generate",
    "TrigramEncoder",
    "cosine",
    "default_encode",
    "Concept",
    "KnowledgeGraph",
    "KnowledgeGraphExpert",
    "kg_generate",
    "load_knowledge_graph",
    "parse_knowledge_graph",
    "Lexicon",
    "LexiconExpert",
    "lexicon_generate",
    "load_lexicon",
    "RuleBasedExpert",
    "load_markers",
    "rulebased_generate",
    "SimilarityExpert",
    "SimilarityIndex",
    "build_similarity_index",
    "similarity_generate",
    "FixtureBackend",
    "SearchBackend",
    "WebSearchExpert",
    "load_stoplist",
    "websearch_generate",
]
