"""Domain types and file I/O for documentation, models, code artifacts and links.

File formats (all UTF-8, ``\\n`` line endings):

* documentation: plain text, one sentence per line, line ``k`` is sentence ``k``
* component list: CSV with header ``id,name``
* links and gold standards: CSV with header ``left,right``
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import FormatError, KindMismatchError


class LinkKind(str, enum.Enum):
    SAD_SAM = "sad-sam"
    SAM_CODE = "sam-code"
    SAD_CODE = "sad-code"


class Provenance(str, enum.Enum):
    MANUAL = "manual"
    EXTRACTED_DOC = "extracted-doc"
    EXTRACTED_CODE = "extracted-code"
    EXTRACTED_COMBINED = "extracted-combined"


class ArtifactKind(str, enum.Enum):
    FILE = "file"
    PACKAGE = "package"


@dataclass(frozen=True)
class Sentence:
    id: int
    text: str

    def __post_init__(self):
        if not isinstance(self.id, int) or self.id < 1:
            raise ValueError(f"sentence id must be a positive integer, got {self.id!r}")
        if "\n" in self.text or "\r" in self.text:
            raise ValueError(f"sentence {self.id} contains a line break")


@dataclass(frozen=True)
class SadDocument:
    project: str
    sentences: tuple[Sentence, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        for expected, sentence in enumerate(self.sentences, start=1):
            if sentence.id != expected:
                raise ValueError(
                    f"sentence ids must be consecutive from 1; position {expected} has id {sentence.id}"
                )

    @classmethod
    def from_lines(cls, project: str, lines: Iterable[str]) -> "SadDocument":
        return cls(project, tuple(Sentence(i, text) for i, text in enumerate(lines, start=1)))

    def __len__(self):
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    @property
    def text(self) -> str:
        """The document body with one sentence per line."""
        return "\n".join(s.text for s in self.sentences)

    def sentence_ids(self) -> set[int]:
        return {s.id for s in self.sentences}


@dataclass(frozen=True)
class Component:
    id: str
    name: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("component id must be non-empty")
        if not self.name:
            raise ValueError(f"component {self.id!r} has an empty name")


@dataclass(frozen=True)
class Sam:
    project: str
    components: tuple[Component, ...] = ()
    provenance: Provenance = Provenance.MANUAL

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        seen = set()
        for component in self.components:
            if component.id in seen:
                raise ValueError(f"duplicate component id {component.id!r}")
            seen.add(component.id)

    def __len__(self):
        return len(self.components)

    def __iter__(self) -> Iterator[Component]:
        return iter(self.components)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.components]

    def component_ids(self) -> set[str]:
        return {c.id for c in self.components}


@dataclass(frozen=True)
class CodeArtifact:
    path: str
    kind: ArtifactKind = ArtifactKind.FILE

    def __post_init__(self):
        object.__setattr__(self, "kind", ArtifactKind(self.kind))
        _check_code_path(self.path)


def _check_code_path(path: str) -> None:
    if not path or path.startswith("/") or "\\" in path:
        raise ValueError(f"code paths must be relative and '/'-separated, got {path!r}")


def _check_sentence_endpoint(value: str) -> None:
    if not value.isdigit() or int(value) < 1:
        raise ValueError(f"sentence endpoint must be a positive integer, got {value!r}")


def _check_component_endpoint(value: str) -> None:
    if not value:
        raise ValueError("component endpoint must be non-empty")


_ENDPOINT_CHECKS = {
    LinkKind.SAD_SAM: (_check_sentence_endpoint, _check_component_endpoint),
    LinkKind.SAM_CODE: (_check_component_endpoint, _check_code_path),
    LinkKind.SAD_CODE: (_check_sentence_endpoint, _check_code_path),
}


@dataclass(frozen=True, order=True)
class TraceLink:
    kind: LinkKind
    left: str
    right: str

    def __post_init__(self):
        object.__setattr__(self, "kind", LinkKind(self.kind))
        object.__setattr__(self, "left", str(self.left))
        object.__setattr__(self, "right", str(self.right))
        check_left, check_right = _ENDPOINT_CHECKS[self.kind]
        check_left(self.left)
        check_right(self.right)


@dataclass(frozen=True)
class LinkSet:
    """A set of trace links that all share one kind."""

    kind: LinkKind
    links: frozenset[TraceLink] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "kind", LinkKind(self.kind))
        links = frozenset(self.links)
        for link in links:
            if link.kind != self.kind:
                raise KindMismatchError(f"{link.kind.value} link in a {self.kind.value} link set")
        object.__setattr__(self, "links", links)

    @classmethod
    def from_pairs(cls, kind: LinkKind | str, pairs: Iterable[tuple]) -> "LinkSet":
        kind = LinkKind(kind)
        return cls(kind, frozenset(TraceLink(kind, left, right) for left, right in pairs))

    def pairs(self) -> set[tuple[str, str]]:
        return {(link.left, link.right) for link in self.links}

    def sorted_pairs(self) -> list[tuple[str, str]]:
        return sorted(self.pairs())

    def union(self, other: "LinkSet") -> "LinkSet":
        if other.kind != self.kind:
            raise KindMismatchError(f"cannot merge {self.kind.value} with {other.kind.value}")
        return LinkSet(self.kind, self.links | other.links)

    def __len__(self):
        return len(self.links)

    def __iter__(self) -> Iterator[TraceLink]:
        return iter(sorted(self.links))

    def __contains__(self, item):
        if isinstance(item, tuple):
            return item in self.pairs()
        return item in self.links


@dataclass(frozen=True)
class GoldStandard:
    kind: LinkKind
    links: LinkSet

    def __post_init__(self):
        object.__setattr__(self, "kind", LinkKind(self.kind))
        if self.links.kind != self.kind:
            raise KindMismatchError(
                f"gold standard of kind {self.kind.value} holds {self.links.kind.value} links"
            )

    def __len__(self):
        return len(self.links)


# -- loaders and writers -----------------------------------------------------


def _read_text(path) -> str:
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from exc


def load_sad(path, project: str | None = None) -> SadDocument:
    """Load a one-sentence-per-line documentation file.

    Trailing empty lines are dropped; interior empty lines are kept so sentence
    ids stay equal to line numbers.
    """
    text = _read_text(path)
    if text.startswith("\ufeff"):
        text = text[1:]
    lines = [line[:-1] if line.endswith("\r") else line for line in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return SadDocument.from_lines(project or Path(path).stem, lines)


def _read_csv(path, header: tuple[str, ...]) -> list[tuple[int, list[str]]]:
    text = _read_text(path)
    if text.startswith("\ufeff"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text, newline=""))
    rows = []
    found_header = None
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        if found_header is None:
            found_header = tuple(cell.strip() for cell in row)
            if found_header != header:
                raise FormatError(f"{path}: expected header {','.join(header)!r}, got {','.join(row)!r}")
            continue
        if len(row) != len(header):
            raise FormatError(f"{path}:{reader.line_num}: expected {len(header)} columns, got {len(row)}")
        rows.append((reader.line_num, [cell.strip() for cell in row]))
    if found_header is None:
        raise FormatError(f"{path}: missing header {','.join(header)!r}")
    return rows


def load_component_list(path, project: str | None = None) -> Sam:
    components = []
    seen = set()
    for line_no, (cid, name) in _read_csv(path, ("id", "name")):
        if cid in seen:
            raise FormatError(f"{path}:{line_no}: duplicate component id {cid!r}")
        seen.add(cid)
        try:
            components.append(Component(cid, name))
        except ValueError as exc:
            raise FormatError(f"{path}:{line_no}: {exc}") from exc
    return Sam(project or Path(path).stem, tuple(components), Provenance.MANUAL)


def write_component_list(sam: Sam, path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "name"])
    for component in sam.components:
        writer.writerow([component.id, component.name])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def load_links(path, kind: LinkKind | str) -> LinkSet:
    kind = LinkKind(kind)
    links = set()
    for line_no, (left, right) in _read_csv(path, ("left", "right")):
        try:
            links.add(TraceLink(kind, left, right))
        except ValueError as exc:
            raise FormatError(f"{path}:{line_no}: {exc}") from exc
    return LinkSet(kind, frozenset(links))


def load_gold_links(path, kind: LinkKind | str) -> GoldStandard:
    links = load_links(path, kind)
    return GoldStandard(links.kind, links)


def links_to_csv(links: LinkSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["left", "right"])
    writer.writerows(links.sorted_pairs())
    return buf.getvalue()


def write_links(links: LinkSet, path) -> None:
    """Write ``links`` as CSV, rows sorted by (left, right) for stable diffs."""
    Path(path).write_text(links_to_csv(links), encoding="utf-8")
