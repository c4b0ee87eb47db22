"""Expert over a file-based linguistic knowledge graph.

Each concept is rendered as a pseudo-document (lemmas, definition and
the lemmas of related concepts) and searched by cosine like the
similarity expert; matching concepts emit their lemmas and inflections
of the requested length.

Graph file format, one block per concept::

    CONCEPT metal-or
    LEMMA or
    LEMMA metal jaune
    DEF metal precieux jaune
    REL kind_of<TAB>metal
    INFL ors
    END
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..text import normalize_answer, UnrepresentableError
from .base import CandidateList, empty_list, list_from_scores
from .encoder import TrigramEncoder, Vector, cosine
from .similarity import DEFAULT_K, DEFAULT_TEMPERATURE, softmax


class KnowledgeGraphError(ValueError):
    """Malformed or inconsistent knowledge-graph file."""


@dataclass(frozen=True)
class Concept:
    concept_id: str
    lemmas: tuple[str, ...]
    definition: str = ""
    relations: tuple[tuple[str, str], ...] = ()
    inflections: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.lemmas:
            raise KnowledgeGraphError(f"concept {self.concept_id}: no lemmas")


@dataclass
class KnowledgeGraph:
    concepts: dict[str, Concept] = field(default_factory=dict)

    def __post_init__(self):
        for concept in self.concepts.values():
            for kind, target in concept.relations:
                if target not in self.concepts:
                    raise KnowledgeGraphError(
                        f"concept {concept.concept_id}: relation {kind!r} "
                        f"targets unknown concept {target!r}"
                    )

    def pseudo_document(self, concept: Concept) -> str:
        parts = list(concept.lemmas)
        if concept.definition:
            parts.append(concept.definition)
        for _, target in concept.relations:
            parts.extend(self.concepts[target].lemmas)
        return " ".join(parts)

    def __len__(self) -> int:
        return len(self.concepts)


def parse_knowledge_graph(text: str) -> KnowledgeGraph:
    concepts: dict[str, Concept] = {}
    current: dict | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tag, _, rest = raw.partition(" ")
        tag = tag.strip()
        if tag == "CONCEPT":
            if current is not None:
                raise KnowledgeGraphError(f"line {lineno}: CONCEPT inside open block")
            current = {
                "id": rest.strip(), "lemmas": [], "def": "",
                "relations": [], "inflections": [],
            }
            if not current["id"]:
                raise KnowledgeGraphError(f"line {lineno}: missing concept id")
        elif current is None:
            raise KnowledgeGraphError(f"line {lineno}: content outside a concept block")
        elif tag == "LEMMA":
            current["lemmas"].append(rest.strip())
        elif tag == "DEF":
            current["def"] = rest.strip()
        elif tag == "REL":
            kind, _, target = rest.strip().partition("\t")
            if not kind or not target:
                raise KnowledgeGraphError(f"line {lineno}: REL needs kind<TAB>target")
            current["relations"].append((kind, target))
        elif tag == "INFL":
            current["inflections"].append(rest.strip())
        elif line == "END":
            concept = Concept(
                current["id"],
                tuple(current["lemmas"]),
                current["def"],
                tuple(current["relations"]),
                tuple(current["inflections"]),
            )
            if concept.concept_id in concepts:
                raise KnowledgeGraphError(f"duplicate concept {concept.concept_id!r}")
            concepts[concept.concept_id] = concept
            current = None
        else:
            raise KnowledgeGraphError(f"line {lineno}: unknown tag {tag!r}")
    if current is not None:
        raise KnowledgeGraphError("unterminated concept block")
    return KnowledgeGraph(concepts)


def load_knowledge_graph(path) -> KnowledgeGraph:
    with open(path, encoding="utf-8") as handle:
        return parse_knowledge_graph(handle.read())


def _concept_answers(concept: Concept, length: int) -> set[str]:
    answers = set()
    for word in list(concept.lemmas) + list(concept.inflections):
        try:
            normalized = normalize_answer(word)
        except UnrepresentableError:
            continue
        if len(normalized) == length:
            answers.add(normalized)
    return answers


@dataclass
class KnowledgeGraphExpert:
    graph: KnowledgeGraph
    encoder: TrigramEncoder | None = None
    k: int = DEFAULT_K
    temperature: float = DEFAULT_TEMPERATURE
    expert_id: str = "kg"
    _docs: tuple[tuple[Concept, Vector], ...] = field(init=False, repr=False)

    def __post_init__(self):
        self._index()

    def _index(self):
        ordered = sorted(self.graph.concepts.values(), key=lambda c: c.concept_id)
        docs = [self.graph.pseudo_document(c) for c in ordered]
        if self.encoder is None:
            self.encoder = TrigramEncoder.fit(docs)
        self._docs = tuple(
            (concept, self.encoder.encode(doc)) for concept, doc in zip(ordered, docs)
        )

    def generate(self, clue: str, length: int) -> CandidateList:
        return kg_generate(
            clue, length, self, k=self.k, temperature=self.temperature
        )


def kg_generate(
    clue: str,
    length: int,
    expert: KnowledgeGraphExpert,
    clue_id: str = "",
    k: int = DEFAULT_K,
    temperature: float = DEFAULT_TEMPERATURE,
) -> CandidateList:
    """Cosine search of the clue against concept pseudo-documents.

    Concept softmax scores flow to the concept's lemma/inflection answers
    of the requested length; the retained mass caps the confidence.
    """
    if not expert._docs:
        return empty_list("kg", clue_id)
    qvec = expert.encoder.encode(clue)
    scored = [(cosine(qvec, vec), concept) for concept, vec in expert._docs]
    scored.sort(key=lambda sc: (-sc[0], sc[1].concept_id))
    top = scored[:k]
    weights = softmax([s for s, _ in top], temperature)
    scores: dict[str, float] = {}
    retained = 0.0
    for weight, (_, concept) in zip(weights, top):
        answers = _concept_answers(concept, length)
        for answer in answers:
            scores[answer] = scores.get(answer, 0.0) + weight
            retained += weight
    return list_from_scores(scores, "kg", clue_id, confidence=min(1.0, retained))
