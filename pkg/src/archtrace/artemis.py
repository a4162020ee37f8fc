"""LLM-based architecture entity recognition and matching to model components.

The pipeline asks the model for entities in plain text, asks again for a JSON
rendering, maps each quoted occurrence back to a documentation sentence and
finally links entities to model components by name similarity.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace

from .errors import MalformedResponseError, PipelineError
from .exarch import prompt_template
from .llm import ChatMessage, LLMGateway
from .model import LinkKind, LinkSet, SadDocument, Sam, TraceLink
from .similarity import cosine_similarity, jaro_winkler_similarity, normalized_levenshtein_similarity

logger = logging.getLogger(__name__)

RETRY_NOTE = (
    "The previous answer could not be parsed. Reply with the JSON array only, "
    "without any surrounding text."
)


@dataclass(frozen=True)
class RecognizedEntity:
    name: str
    alternative_names: tuple[str, ...] = ()
    occurrences: tuple[str, ...] = ()
    resolved_sentences: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("entity name must be non-empty")
        object.__setattr__(self, "alternative_names", tuple(self.alternative_names))
        object.__setattr__(self, "occurrences", tuple(self.occurrences))
        object.__setattr__(self, "resolved_sentences", tuple(sorted(set(self.resolved_sentences))))

    @property
    def variants(self) -> list[str]:
        """Primary name followed by the alternatives, without repeats."""
        seen = []
        for v in (self.name, *self.alternative_names):
            if v and v not in seen:
                seen.append(v)
        return seen

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "alternativeNames": list(self.alternative_names),
            "occurrences": list(self.occurrences),
            "resolvedSentences": list(self.resolved_sentences),
        }


@dataclass(frozen=True)
class MatchConfig:
    jaro_winkler_threshold: float = 0.90
    levenshtein_threshold: float = 0.80
    cosine_threshold: float = 0.85

    def __post_init__(self):
        for name in ("jaro_winkler_threshold", "levenshtein_threshold", "cosine_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")


# -- prompts -----------------------------------------------------------------


def task_prompt(sad: SadDocument, sam_names=()) -> str:
    parts = [prompt_template("artemis_task").rstrip("\n"), "", "Text:", sad.text]
    if sam_names:
        parts += ["", "Known component names to look out for:"]
        parts += [f"- {name}" for name in sam_names]
    return "\n".join(parts)


def format_prompt(plain_text: str) -> str:
    return "\n".join([prompt_template("artemis_format").rstrip("\n"), "", "Last answer:", plain_text])


def recognize_entities(sad: SadDocument, sam_names, gateway: LLMGateway, mode=None) -> str:
    if not len(sad):
        raise ValueError("documentation is empty")
    return gateway.complete([ChatMessage("user", task_prompt(sad, list(sam_names)))], mode)


def format_entities(plain_text: str, gateway: LLMGateway, mode=None) -> str:
    return gateway.complete([ChatMessage("user", format_prompt(plain_text))], mode)


# -- parsing -----------------------------------------------------------------


def _string_list(value, field_name, index):
    if value is None:
        return ()
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise MalformedResponseError(f"entity {index}: {field_name!r} must be a list of strings")
    return tuple(value)


def _first_entity_array(text: str):
    decoder = json.JSONDecoder()
    start = text.find("[")
    while start != -1:
        try:
            value, _ = decoder.raw_decode(text, start)
        except json.JSONDecodeError:
            value = None
        if isinstance(value, list) and all(isinstance(v, dict) for v in value):
            return value
        start = text.find("[", start + 1)
    return None


def parse_entities(json_text: str) -> list[RecognizedEntity]:
    """Parse the first JSON array of entity objects found in ``json_text``.

    Surrounding prose and code fences are tolerated.
    """
    array = _first_entity_array(json_text)
    if array is None:
        raise MalformedResponseError("response contains no JSON array of entities")
    entities = []
    for index, item in enumerate(array):
        name = item.get("name")
        if not isinstance(name, str) or not name.strip():
            raise MalformedResponseError(f"entity {index} has no name")
        kind = item.get("type")
        if kind is not None and not isinstance(kind, str):
            raise MalformedResponseError(f"entity {index}: 'type' must be a string")
        entities.append(RecognizedEntity(
            name.strip(),
            _string_list(item.get("alternativeNames"), "alternativeNames", index),
            _string_list(item.get("occurrences"), "occurrences", index),
        ))
    return entities


def dump_entities(entities, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([e.to_dict() for e in entities], fh, indent=2, ensure_ascii=False)
        fh.write("\n")


# -- occurrence mapping ------------------------------------------------------


def map_occurrence_to_sentence(occurrence: str, sad: SadDocument) -> int:
    """Sentence id for a quoted line: exact match first, else the most similar one.

    Ties go to the lowest sentence id; there is no similarity floor.
    """
    if not len(sad):
        raise ValueError("documentation is empty")
    needle = occurrence.strip()
    for sentence in sad.sentences:
        if sentence.text.strip() == needle:
            return sentence.id
    best_id, best_score = sad.sentences[0].id, -1.0
    for sentence in sad.sentences:
        score = normalized_levenshtein_similarity(needle, sentence.text.strip())
        if score > best_score:
            best_id, best_score = sentence.id, score
    return best_id


def resolve_occurrences(entities, sad: SadDocument) -> list[RecognizedEntity]:
    return [
        replace(e, resolved_sentences=tuple(map_occurrence_to_sentence(o, sad) for o in e.occurrences))
        for e in entities
    ]


# -- matching ----------------------------------------------------------------


@dataclass
class PairScores:
    jaro_winkler: float = 0.0
    levenshtein: float = 0.0
    cosine: float = 0.0
    exact: bool = False

    def matched(self, config: MatchConfig) -> bool:
        return (
            self.exact
            or self.jaro_winkler > config.jaro_winkler_threshold
            or self.levenshtein > config.levenshtein_threshold
            or self.cosine > config.cosine_threshold
        )


@dataclass
class _EmbeddingCache:
    gateway: LLMGateway
    mode: object = None
    vectors: dict = field(default_factory=dict)

    def prefetch(self, texts):
        missing = sorted({t for t in texts if t not in self.vectors})
        if missing:
            self.vectors.update(zip(missing, self.gateway.embed(missing, self.mode)))

    def __getitem__(self, text):
        return self.vectors[text]


def score_pair(variants, component_name: str, embeddings) -> PairScores:
    """Best score per channel over all entity name variants (case-insensitive)."""
    target = component_name.lower()
    scores = PairScores()
    for variant in (v.lower() for v in variants):
        scores.exact = scores.exact or variant == target
        scores.jaro_winkler = max(scores.jaro_winkler, jaro_winkler_similarity(variant, target))
        scores.levenshtein = max(scores.levenshtein, normalized_levenshtein_similarity(variant, target))
        scores.cosine = max(scores.cosine, cosine_similarity(embeddings[variant], embeddings[target]))
    return scores


def match_entities_to_sam(entities, sam: Sam, gateway: LLMGateway, config: MatchConfig | None = None,
                          mode=None) -> LinkSet:
    """Link every resolved sentence of an entity to each component it matches."""
    config = config or MatchConfig()
    entities = list(entities)
    if not entities or not len(sam):
        return LinkSet(LinkKind.SAD_SAM)
    cache = _EmbeddingCache(gateway, mode)
    cache.prefetch([v.lower() for e in entities for v in e.variants] + [c.name.lower() for c in sam])
    links = set()
    for entity in entities:
        for component in sam.components:
            if score_pair(entity.variants, component.name, cache).matched(config):
                links.update(TraceLink(LinkKind.SAD_SAM, str(s), component.id) for s in entity.resolved_sentences)
    return LinkSet(LinkKind.SAD_SAM, frozenset(links))


def recognize_and_parse(sad: SadDocument, sam_names, gateway: LLMGateway, mode=None) -> list[RecognizedEntity]:
    """Recognition and formatting prompts, retrying the formatting once on bad JSON."""
    plain = recognize_entities(sad, sam_names, gateway, mode)
    formatted = format_entities(plain, gateway, mode)
    try:
        return parse_entities(formatted)
    except MalformedResponseError as first_error:
        logger.info("entity JSON malformed (%s); retrying formatting once", first_error)
        retry = [
            ChatMessage("user", format_prompt(plain)),
            ChatMessage("assistant", formatted),
            ChatMessage("user", RETRY_NOTE),
        ]
        try:
            return parse_entities(gateway.complete(retry, mode))
        except MalformedResponseError as exc:
            raise PipelineError("artemis-format", f"malformed entity JSON after retry: {exc}") from exc


def run_artemis(sad: SadDocument, sam: Sam, gateway: LLMGateway, config: MatchConfig | None = None,
                mode=None, entities_out=None) -> LinkSet:
    if not len(sam):
        return LinkSet(LinkKind.SAD_SAM)
    entities = resolve_occurrences(recognize_and_parse(sad, sam.names, gateway, mode), sad)
    if entities_out is not None:
        dump_entities(entities, entities_out)
    return match_entities_to_sam(entities, sam, gateway, config, mode)
