"""Input coercion and checks shared by the estimator wrappers."""

from __future__ import annotations

from numbers import Real

from .features import CodeModel
from .model import CodeArtifact, Component, LinkKind, LinkSet, SadDocument, Sam


def check_threshold(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    if not 0.0 <= float(value) <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")
    return float(value)


def check_sad(sad, project: str = "project") -> SadDocument:
    """Accept a :class:`SadDocument` or a sequence of sentence strings."""
    if isinstance(sad, SadDocument):
        return sad
    if isinstance(sad, str):
        raise TypeError("pass documentation as a SadDocument or a list of sentences, not a single string")
    return SadDocument.from_lines(project, list(sad))


def check_sam(sam, project: str = "project") -> Sam:
    """Accept a :class:`Sam`, a sequence of components, or a sequence of names."""
    if isinstance(sam, Sam):
        return sam
    items = list(sam)
    if all(isinstance(i, Component) for i in items):
        return Sam(project, tuple(items))
    if all(isinstance(i, str) for i in items):
        return Sam(project, tuple(Component(f"x-{i}", name) for i, name in enumerate(items)))
    raise TypeError("expected a Sam, Components or component names")


def check_code_paths(code) -> list[str]:
    """Sorted unique relative paths from a :class:`CodeModel` or an iterable of paths."""
    if isinstance(code, CodeModel):
        paths = code.paths
    elif isinstance(code, str):
        raise TypeError("pass a CodeModel or a list of paths, not a single string")
    else:
        paths = [c.path if isinstance(c, CodeArtifact) else str(c) for c in code]
    for p in paths:
        CodeArtifact(p)
    return sorted(set(paths))


def check_links(links, kind: LinkKind) -> LinkSet:
    if isinstance(links, LinkSet):
        if links.kind != kind:
            raise ValueError(f"expected {kind.value} links, got {links.kind.value}")
        return links
    links_attr = getattr(links, "links", None)
    if isinstance(links_attr, LinkSet):
        return check_links(links_attr, kind)
    return LinkSet.from_pairs(kind, links)
