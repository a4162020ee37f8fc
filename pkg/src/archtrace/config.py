"""Flat ``key=value`` run configuration.

Precedence is command-line flags, then the config file, then the defaults
below. Unknown keys are reported with a warning and ignored.
"""

from __future__ import annotations

import logging
from pathlib import Path

from .errors import FormatError

logger = logging.getLogger(__name__)


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _optional(text: str):
    return text.strip() or None


# key -> (parser, default)
SCHEMA = {
    "threshold": (float, 0.5),
    "casing": (str, "strict-camel"),
    "mode": (str, "doc"),
    "aggregation": (str, "similarity"),
    "temperature": (float, 0.0),
    "seed": (int, 0),
    "model": (str, "gpt-4o"),
    "embedding-model": (str, "offline"),
    "provider-url": (str, "https://api.openai.com/v1"),
    "llm-mode": (str, "replay"),
    "cassette-path": (_optional, None),
    "jw-threshold": (float, 0.90),
    "lev-threshold": (float, 0.80),
    "cos-threshold": (float, 0.85),
    "link-threshold": (float, 0.6),
    "dominance-band": (float, 0.05),
    "heuristic-weights": (_optional, None),
    "source-roots": (_list, ("src/main/java", "src/test/java", "src")),
    "extensions": (_list, (".java",)),
    "exclude-globs": (_list, (".git", ".svn", ".hg", "build", "target", "out", ".gradle", ".idea")),
    "exclude-test-code": (_bool, False),
}

DEFAULTS = {key: default for key, (_, default) in SCHEMA.items()}


def parse_config(text: str, origin: str = "<config>") -> dict:
    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise FormatError(f"{origin}:{line_no}: expected key=value, got {raw!r}")
        if key not in SCHEMA:
            logger.warning("%s:%d: unknown config key %r ignored", origin, line_no, key)
            continue
        parser, _ = SCHEMA[key]
        try:
            values[key] = parser(value.strip())
        except ValueError as exc:
            raise FormatError(f"{origin}:{line_no}: bad value for {key}: {exc}") from exc
    return values


def load_config(path) -> dict:
    return parse_config(Path(path).read_text(encoding="utf-8"), str(path))


def resolve(file_values: dict | None = None, flag_values: dict | None = None) -> dict:
    """Merge defaults, file values and flags (flags win); ``None`` flags are ignored."""
    merged = dict(DEFAULTS)
    merged.update(file_values or {})
    merged.update({k: v for k, v in (flag_values or {}).items() if v is not None})
    return merged
