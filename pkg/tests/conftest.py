from pathlib import Path

import pytest

from archtrace.llm import Cassette, LLMGateway, Mode

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
TOY = TESTS.parent / "src" / "archtrace" / "data" / "toy"

MEDIASTORE_PACKAGES = {
    # 97 files spread over the modules of the reference layout
    "audioaccess": 6, "cache": 5, "db": 9, "downloadloadbalancer": 4, "facade": 12,
    "filestorage": 7, "mediaaccess": 10, "mediamanagement": 11, "packaging": 5,
    "parallelwatermarking": 4, "reencoding": 6, "tagwatermarking": 5, "userdbadapter": 6,
    "usermanagement": 7,
}


def write_mediastore_tree(root: Path) -> Path:
    base = root / "src" / "main" / "java" / "mediastore"
    for package, count in MEDIASTORE_PACKAGES.items():
        directory = base / package
        directory.mkdir(parents=True)
        for i in range(count):
            (directory / f"Type{i}.java").write_text(
                f"package mediastore.{package};\n\npublic class Type{i} {{}}\n", encoding="utf-8"
            )
    (root / "README.md").write_text("not code\n", encoding="utf-8")
    (root / "target").mkdir()
    (root / "target" / "Generated.java").write_text("class Generated {}\n", encoding="utf-8")
    return root


@pytest.fixture
def mediastore_tree(tmp_path):
    return write_mediastore_tree(tmp_path / "mediastore")


def replay_gateway(cassette_path, **kwargs) -> LLMGateway:
    return LLMGateway(Mode.REPLAY, Cassette.load(cassette_path), **kwargs)


@pytest.fixture
def block_network(monkeypatch):
    """Make any socket use fail loudly."""
    import socket

    def refuse(*args, **kwargs):
        raise RuntimeError("network access attempted")

    monkeypatch.setattr(socket, "socket", refuse)
    monkeypatch.setattr(socket, "create_connection", refuse)
    monkeypatch.setattr(socket, "getaddrinfo", refuse)


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
