import logging

import pytest

from archtrace.config import DEFAULTS, load_config, parse_config, resolve
from archtrace.errors import FormatError


def test_defaults():
    assert DEFAULTS["threshold"] == 0.5
    assert DEFAULTS["temperature"] == 0.0
    assert DEFAULTS["mode"] == "doc"
    assert DEFAULTS["llm-mode"] == "replay"


def test_parse_values(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\n\nthreshold=0.5\nsource-roots = a, b/c\nexclude-test-code=yes\nseed=3\n")
    values = load_config(path)
    assert values == {"threshold": 0.5, "source-roots": ("a", "b/c"), "exclude-test-code": True, "seed": 3}


def test_flags_override_file_and_defaults():
    merged = resolve(parse_config("threshold=0.5\nmodel=gpt-4\n"), {"threshold": 0.6, "model": None})
    assert merged["threshold"] == 0.6
    assert merged["model"] == "gpt-4"
    assert merged["seed"] == DEFAULTS["seed"]


def test_unknown_key_warns(caplog):
    with caplog.at_level(logging.WARNING):
        assert parse_config("colour=blue\nseed=1\n") == {"seed": 1}
    assert "colour" in caplog.text


@pytest.mark.parametrize("text, line", [("seed=1\nthreshold\n", 2), ("threshold=high\n", 1), ("=3\n", 1)])
def test_errors_report_line_number(text, line):
    with pytest.raises(FormatError, match=f":{line}:"):
        parse_config(text)
