"""Name-based heuristics linking model components to source files.

Every heuristic looks at the package part of a file path (its directories)
and scores it against a component name in [0, 1]; a file's confidence for a
component is the maximum of those scores.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import PurePosixPath

from .features import CodeModel
from .model import Component, LinkKind, LinkSet, Sam, TraceLink
from .similarity import normalized_levenshtein_similarity

DEFAULT_LINK_THRESHOLD = 0.6
DEFAULT_DOMINANCE_BAND = 0.05

_SEPARATORS = re.compile(r"[^0-9A-Za-z]+")
# capitals run before a capitalized word | capitalized/lower word | capitals run | digits
_WORD = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


def tokenize_name(name: str) -> list[str]:
    """Split an identifier or path into lowercase words.

    >>> tokenize_name("UserDBAdapter")
    ['user', 'db', 'adapter']
    >>> tokenize_name("FSESLAkka")
    ['fsesl', 'akka']
    """
    tokens = []
    for chunk in _SEPARATORS.split(name):
        tokens.extend(m.group(0).lower() for m in _WORD.finditer(chunk))
    return [t for t in tokens if t]


@dataclass(frozen=True)
class LinkCandidate:
    component_id: str
    path: str
    confidence: float
    evidence: tuple[tuple[str, float], ...]


def _package_segments(path: str) -> list[str]:
    return list(PurePosixPath(path).parent.parts)


def segment_equality(component_tokens, segments) -> float:
    path_tokens = {t for seg in segments for t in tokenize_name(seg)}
    return 1.0 if path_tokens & set(component_tokens) else 0.0


def name_containment(component_tokens, segments) -> float:
    joined = "".join(component_tokens)
    best = 0.0
    for end in range(1, len(segments) + 1):
        prefix = "".join(t for seg in segments[:end] for t in tokenize_name(seg))
        best = max(best, normalized_levenshtein_similarity(joined, prefix))
    return best


def acronym_match(component_name: str, segments) -> float:
    acronym = "".join(tokenize_name(component_name))
    if len(acronym) < 2:
        return 0.0
    initials = "".join(t[0] for seg in segments for t in tokenize_name(seg))
    return 1.0 if acronym in initials else 0.0


def score_component_file(component: Component, path: str) -> LinkCandidate:
    tokens = tokenize_name(component.name)
    segments = _package_segments(path)
    evidence = (
        ("segment-equality", segment_equality(tokens, segments)),
        ("name-containment", name_containment(tokens, segments)),
        ("acronym", acronym_match(component.name, segments)),
    )
    return LinkCandidate(component.id, path, max(score for _, score in evidence), evidence)


def file_candidates(sam: Sam, path: str, threshold: float = DEFAULT_LINK_THRESHOLD,
                    dominance_band: float = DEFAULT_DOMINANCE_BAND) -> list[LinkCandidate]:
    """Candidates for one file that pass the threshold and the dominance filter."""
    passing = [c for c in (score_component_file(comp, path) for comp in sam.components)
               if c.confidence >= threshold]
    if len(passing) > 1:
        best = max(c.confidence for c in passing)
        passing = [c for c in passing if c.confidence >= best - dominance_band]
    return passing


def _paths(code) -> list[str]:
    if isinstance(code, CodeModel):
        return code.paths
    return [getattr(p, "path", p) for p in code]


def link_sam_to_code(sam: Sam, code, threshold: float = DEFAULT_LINK_THRESHOLD,
                     dominance_band: float = DEFAULT_DOMINANCE_BAND) -> LinkSet:
    """SAM-to-code links for a scanned :class:`CodeModel` or an iterable of paths."""
    links = set()
    for path in sorted(set(_paths(code))):
        for candidate in file_candidates(sam, path, threshold, dominance_band):
            links.add(TraceLink(LinkKind.SAM_CODE, candidate.component_id, path))
    return LinkSet(LinkKind.SAM_CODE, frozenset(links))
