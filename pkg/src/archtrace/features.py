"""Source tree scanning and the "Packages" prompt feature."""

from __future__ import annotations

import fnmatch
import os
import re
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from .errors import ArchTraceError
from .model import ArtifactKind, CodeArtifact

DEFAULT_EXTENSIONS = (".java",)
DEFAULT_SOURCE_ROOTS = ("src/main/java", "src/test/java", "src")
DEFAULT_EXCLUDE_GLOBS = (".git", ".svn", ".hg", "build", "target", "out", ".gradle", ".idea")

FEATURE_NAME = "Packages"

_PACKAGE_DECL = re.compile(r"^\s*package\s+([A-Za-z_][\w]*(?:\s*\.\s*[A-Za-z_][\w]*)*)\s*;?\s*$", re.MULTILINE)
_BLOCK_COMMENT = re.compile(r"/\*.*?\*/", re.DOTALL)
_LINE_COMMENT = re.compile(r"//[^\n]*")


@dataclass(frozen=True)
class ScanConfig:
    """What to scan. ``exclude_globs`` match the relative path or any of its directories."""

    source_roots: tuple[str, ...] = DEFAULT_SOURCE_ROOTS
    extensions: tuple[str, ...] = DEFAULT_EXTENSIONS
    exclude_globs: tuple[str, ...] = DEFAULT_EXCLUDE_GLOBS
    exclude_test_code: bool = False

    def __post_init__(self):
        object.__setattr__(self, "source_roots", tuple(r.strip("/") for r in self.source_roots))
        object.__setattr__(
            self, "extensions",
            tuple(e if e.startswith(".") else "." + e for e in self.extensions),
        )
        object.__setattr__(self, "exclude_globs", tuple(self.exclude_globs))


@dataclass(frozen=True)
class CodeModel:
    root: str
    files: tuple[CodeArtifact, ...] = ()
    packages: tuple[str, ...] = ()
    config: ScanConfig = field(default_factory=ScanConfig)

    @property
    def paths(self) -> list[str]:
        return [f.path for f in self.files]


def _is_excluded(rel_path: str, config: ScanConfig) -> bool:
    if config.exclude_test_code and "/test/" in "/" + rel_path:
        return True
    parts = rel_path.split("/")
    prefixes = ["/".join(parts[: i + 1]) for i in range(len(parts))]
    for pattern in config.exclude_globs:
        if fnmatch.fnmatchcase(rel_path, pattern):
            return True
        if any(fnmatch.fnmatchcase(p, pattern) for p in parts[:-1]):
            return True
        if any(fnmatch.fnmatchcase(p, pattern) for p in prefixes[:-1]):
            return True
    return False


def scan_source_tree(root, config: ScanConfig | None = None) -> CodeModel:
    """Collect source files under ``root`` and derive their packages.

    Paths in the result are relative to ``root`` and '/'-separated; the file list
    is sorted so repeated scans give identical models.
    """
    config = config or ScanConfig()
    root_path = Path(root)
    if not root_path.is_dir():
        raise ArchTraceError(f"cannot scan {root}: not a readable directory")

    def on_error(exc):
        raise ArchTraceError(f"cannot scan {root}: {exc}") from exc

    found = []
    for dirpath, dirnames, filenames in os.walk(root_path, onerror=on_error):
        rel_dir = Path(dirpath).relative_to(root_path).as_posix()
        prefix = "" if rel_dir == "." else rel_dir + "/"
        # prune excluded directories before descending
        dirnames[:] = sorted(d for d in dirnames if not _is_excluded(f"{prefix}{d}/_", config))
        for name in filenames:
            rel = prefix + name
            if name.endswith(config.extensions) and not _is_excluded(rel, config):
                found.append(rel)

    files = tuple(CodeArtifact(p, ArtifactKind.FILE) for p in sorted(found))
    model = CodeModel(str(root_path), files, (), config)
    return CodeModel(model.root, files, tuple(extract_packages(model)), config)


def declared_package(source: str) -> str | None:
    """Return the dotted package declared in ``source``, if any."""
    stripped = _LINE_COMMENT.sub("", _BLOCK_COMMENT.sub("", source))
    match = _PACKAGE_DECL.search(stripped)
    if not match:
        return None
    return re.sub(r"\s+", "", match.group(1))


def path_package(rel_path: str, source_roots=DEFAULT_SOURCE_ROOTS) -> str:
    """Dotted package from a file's directory, relative to the longest matching source root."""
    directory = PurePosixPath(rel_path).parent.as_posix()
    if directory == ".":
        directory = ""
    best = ""
    for root in source_roots:
        if root and (directory == root or directory.startswith(root + "/")) and len(root) > len(best):
            best = root
    remainder = directory[len(best):].strip("/")
    return remainder.replace("/", ".")


def package_of(model: CodeModel, rel_path: str) -> str:
    try:
        source = (Path(model.root) / rel_path).read_text(encoding="utf-8", errors="replace")
    except OSError:
        source = ""
    return declared_package(source) or path_package(rel_path, model.config.source_roots)


def extract_packages(model: CodeModel) -> list[str]:
    """Sorted, unique names of packages that directly contain at least one file.

    Files at a source root with no declaration belong to the unnamed package,
    which is not listed.
    """
    packages = {package_of(model, f.path) for f in model.files}
    packages.discard("")
    return sorted(packages)


def render_feature_text(packages) -> str:
    body = "\n".join(sorted(set(packages))) if packages else "(none)"
    return f"{FEATURE_NAME}:\n{body}"


def split_feature_text(text: str) -> tuple[str, str]:
    """Split rendered feature text into (feature name, content)."""
    head, sep, body = text.partition(":\n")
    if not sep or "\n" in head:
        return FEATURE_NAME, text
    return head.strip(), body
