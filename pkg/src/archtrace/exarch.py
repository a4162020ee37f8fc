"""Component-name extraction from documentation and code via chained prompts."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import EmptyExtractionError
from .features import split_feature_text
from .llm import ChatMessage, LLMGateway
from .model import Component, Provenance, SadDocument, Sam
from .similarity import normalized_levenshtein_similarity

DEFAULT_THRESHOLD = 0.5

_COMPONENT_WORD = re.compile(r"\b(?:components|component)\b", re.IGNORECASE)
_WHITESPACE = re.compile(r"\s+")


class Source(str, enum.Enum):
    DOC = "doc"
    CODE = "code"
    COMBINED_PROMPT = "combined-prompt"
    COMBINED_SIMILARITY = "combined-similarity"


class Casing(str, enum.Enum):
    STRICT_CAMEL = "strict-camel"
    LEGACY = "legacy-space-removal"


_PROVENANCE = {
    Source.DOC: Provenance.EXTRACTED_DOC,
    Source.CODE: Provenance.EXTRACTED_CODE,
    Source.COMBINED_PROMPT: Provenance.EXTRACTED_COMBINED,
    Source.COMBINED_SIMILARITY: Provenance.EXTRACTED_COMBINED,
}


@dataclass(frozen=True)
class ComponentNameList:
    names: tuple[str, ...]
    source: Source

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "source", Source(self.source))
        if len(set(self.names)) != len(self.names):
            raise ValueError("component names must be unique")
        for name in self.names:
            if not name or _WHITESPACE.search(name):
                raise ValueError(f"invalid component name {name!r}")

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)


@dataclass(frozen=True)
class AggregationConfig:
    threshold: float = DEFAULT_THRESHOLD
    casing: Casing = Casing.STRICT_CAMEL

    def __post_init__(self):
        object.__setattr__(self, "casing", Casing(self.casing))
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")


@lru_cache(maxsize=None)
def prompt_template(name: str) -> str:
    return resources.files("archtrace.prompts").joinpath(f"{name}.txt").read_text(encoding="utf-8")


def doc_prompt(sad: SadDocument) -> str:
    return prompt_template("doc_to_arch_1").format(documentation=sad.text)


def name_list_prompt() -> str:
    return prompt_template("doc_to_arch_2").format(output_format=prompt_template("output_format"))


def code_prompt(feature_text: str) -> str:
    feature, content = split_feature_text(feature_text)
    return prompt_template("code_to_arch_1").format(feature=feature, content=content)


def aggregation_prompt(names) -> str:
    return prompt_template("aggregation").format(
        output_format=prompt_template("output_format"), names=", ".join(names)
    )


# -- response interpretation -------------------------------------------------


def _camel_join(name: str) -> str:
    tokens = name.split()
    return "".join(t[:1].upper() + t[1:] for t in tokens)


def parse_component_list(response: str, casing: Casing | str = Casing.STRICT_CAMEL) -> list[str]:
    """Turn a dash-list answer into component names.

    Only lines whose stripped form starts with '-' count. The words
    "component"/"components" are dropped as whole words, then the remaining
    words are joined: either by plain space removal (legacy) or by capitalizing
    each word first (strict camel case). Empty names and repeats are dropped.
    """
    casing = Casing(casing)
    names: list[str] = []
    for line in response.splitlines():
        stripped = line.strip()
        if not stripped.startswith("-"):
            continue
        raw = _COMPONENT_WORD.sub(" ", stripped[1:])
        if casing is Casing.LEGACY:
            name = _WHITESPACE.sub("", raw)
        else:
            name = _camel_join(raw)
        # joining can reassemble the dropped word, e.g. "compo nent"
        if not name or _COMPONENT_WORD.fullmatch(name):
            continue
        if name not in names:
            names.append(name)
    return names


# -- extraction chains -------------------------------------------------------


def _finish(response: str, source: Source, casing: Casing, what: str) -> ComponentNameList:
    names = parse_component_list(response, casing)
    if not names:
        raise EmptyExtractionError(f"{what} extraction produced no component names")
    return ComponentNameList(tuple(names), source)


def _two_step(gateway: LLMGateway, first_prompt: str, mode) -> str:
    first = ChatMessage("user", first_prompt)
    elaboration = gateway.complete([first], mode)
    follow_up = [first, ChatMessage("assistant", elaboration), ChatMessage("user", name_list_prompt())]
    return gateway.complete(follow_up, mode)


def extract_names_from_sad(sad: SadDocument, gateway: LLMGateway, mode=None,
                           casing: Casing | str = Casing.STRICT_CAMEL) -> ComponentNameList:
    if not len(sad):
        raise ValueError("documentation is empty")
    response = _two_step(gateway, doc_prompt(sad), mode)
    return _finish(response, Source.DOC, Casing(casing), "documentation")


def extract_names_from_code(features: str, gateway: LLMGateway, mode=None,
                            casing: Casing | str = Casing.STRICT_CAMEL) -> ComponentNameList:
    if not features.strip():
        raise ValueError("feature text is empty")
    response = _two_step(gateway, code_prompt(features), mode)
    return _finish(response, Source.CODE, Casing(casing), "code")


def aggregate_via_similarity(doc_names, code_names,
                             config: AggregationConfig | None = None) -> ComponentNameList:
    """Merge name lists sequentially, documentation names first.

    A candidate is dropped when it is more similar than the threshold to any
    name already kept, or equal to one of them ignoring case.
    """
    config = config or AggregationConfig()
    accepted: list[str] = []
    for name in (*doc_names, *code_names):
        if any(name.lower() == kept.lower() for kept in accepted):
            continue
        if all(normalized_levenshtein_similarity(name, kept) <= config.threshold for kept in accepted):
            accepted.append(name)
    return ComponentNameList(tuple(accepted), Source.COMBINED_SIMILARITY)


def aggregate_via_prompt(doc_names, code_names, gateway: LLMGateway, mode=None,
                         casing: Casing | str = Casing.STRICT_CAMEL) -> ComponentNameList:
    candidates = [*doc_names, *code_names]
    if not candidates:
        raise ValueError("nothing to aggregate")
    response = gateway.complete([ChatMessage("user", aggregation_prompt(candidates))], mode)
    return _finish(response, Source.COMBINED_PROMPT, Casing(casing), "aggregation")


def build_simple_sam(names: ComponentNameList, project: str) -> Sam:
    if not len(names):
        raise ValueError("cannot build a model from an empty name list")
    components = tuple(Component(f"x-{i}", name) for i, name in enumerate(names.names))
    return Sam(project, components, _PROVENANCE[names.source])
