"""Regenerate the recorded transcripts under tests/fixtures.

Each fixture project gets a small synthetic documentation file and a cassette
whose responses carry the component names reported for that project, so
replay tests exercise the real prompt chains and parsers.

    python3 tools/record_test_cassettes.py
"""

from __future__ import annotations

import json
from pathlib import Path

from archtrace.artemis import run_artemis
from archtrace.exarch import Casing, extract_names_from_code, extract_names_from_sad
from archtrace.llm import Cassette, LLMGateway, Mode, ScriptedProvider
from archtrace.model import load_component_list, load_sad

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

MEDIASTORE_NAMES = [
    "AudioAccess", "DataStorage", "Database", "Facade", "MediaAccess", "MediaManagement",
    "Packaging", "ReEncoder", "TagWatermarking", "UserDBAdapter", "UserManagement",
]
JABREF_DOC_NAMES = ["Cli", "EventBus", "Gui", "Logic", "Model", "Preferences"]
JABREF_CODE_NAMES = ["GUI", "Logic", "Model", "Networking", "Preferences"]
TEAMMATES_CODE_LINES = [
    "Architecture and Main Entry Point",
    "UI Component",
    "Logic Component",
    "Storage Component",
    "Common Utilities",
]

JABREF_FEATURES = "Packages:\n" + "\n".join(
    f"org.jabref.{p}" for p in ("cli", "gui", "logic", "model", "logic.net", "preferences")
)
TEAMMATES_FEATURES = "Packages:\n" + "\n".join(
    f"teammates.{p}" for p in ("common.util", "logic.api", "logic.core", "main", "storage.api", "ui.webapi")
)

# (entity name, alternatives, sentence ids) for the JabRef recognition transcript
JABREF_ENTITIES = [
    ("GUI", ["gui", "user interface"], [2, 3, 9]),
    ("Logic", [], [2, 4, 5, 9]),
    ("Model", [], [2, 5, 6]),
    ("Preferences", [], [7]),
    ("CLI", ["command line interface"], [8]),
    ("EventBus", ["event bus"], [10, 11]),
]


def _dash_list(names):
    return "\n".join(f"- {n}" for n in names) + "\n"


def _gateway(path: Path, script, model: str = "gpt-4o") -> LLMGateway:
    if path.exists():
        path.unlink()
    return LLMGateway(Mode.RECORD, Cassette.load(path, missing_ok=True), ScriptedProvider(script), model=model)


def record_mediastore():
    base = FIXTURES / "mediastore"
    gateway = _gateway(base / "cassette.json", {
        "elaborate on the following documentation":
            "MediaStore is a store for audio files with user management, media access and re-encoding.",
        "only covers the component names": "Here are the components:\n" + _dash_list(MEDIASTORE_NAMES),
    })
    extract_names_from_sad(load_sad(base / "sad.txt", "MS"), gateway)
    gateway.cassette.save()


def record_jabref():
    base = FIXTURES / "jabref"
    sad = load_sad(base / "sad.txt", "JR")
    entities = [
        {
            "name": name,
            "type": "COMPONENT",
            "alternativeNames": alts,
            "occurrences": [sad.sentences[i - 1].text for i in ids],
        }
        for name, alts, ids in JABREF_ENTITIES
    ]
    recognition = "\n".join(
        f"{k}. {name}\n   Lines: " + " | ".join(str(i) for i in ids)
        for k, (name, _, ids) in enumerate(JABREF_ENTITIES, start=1)
    )
    answers = {
        "Last answer:": "Sure, here is the JSON:\n" + json.dumps(entities, indent=2),
        "Identify all architecturally relevant": recognition,
        "elaborate on the following documentation":
            "JabRef is a layered desktop application with a GUI, a logic layer and a model.",
        "summarize the": "The packages suggest a layered structure with networking support.",
    }

    def script(request):
        first, last = request.messages[0].content, request.messages[-1].content
        if "only covers the component names" in last:
            return _dash_list(JABREF_CODE_NAMES if "summarize the" in first else JABREF_DOC_NAMES)
        return next(response for marker, response in answers.items() if marker in last)

    gateway = _gateway(base / "cassette.json", script)
    extract_names_from_sad(sad, gateway)
    extract_names_from_code(JABREF_FEATURES, gateway)
    run_artemis(sad, load_component_list(base / "sam.csv", "JR"), gateway)
    gateway.cassette.save()
    (base / "features.txt").write_text(JABREF_FEATURES + "\n", encoding="utf-8")


def record_teammates():
    base = FIXTURES / "teammates"
    base.mkdir(parents=True, exist_ok=True)
    gateway = _gateway(base / "cassette.json", {
        "summarize the": "TEAMMATES is a web application with a main entry point, UI, logic and storage layers.",
        "only covers the component names": _dash_list(TEAMMATES_CODE_LINES),
    }, model="gpt-4-turbo")
    extract_names_from_code(TEAMMATES_FEATURES, gateway, casing=Casing.LEGACY)
    gateway.cassette.save()
    (base / "features.txt").write_text(TEAMMATES_FEATURES + "\n", encoding="utf-8")


if __name__ == "__main__":
    record_mediastore()
    record_jabref()
    record_teammates()
    print("recorded fixtures under", FIXTURES)
