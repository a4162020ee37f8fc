"""Regenerate the toy project's cassette.

Runs every LLM-backed stage the toy supports in record mode against a scripted
provider, so the cassette holds exactly the requests the pipeline makes.

    python3 tools/record_toy_cassette.py
"""

from __future__ import annotations

import json
from pathlib import Path

from archtrace.artemis import run_artemis
from archtrace.estimators import ComponentExtractor
from archtrace.features import scan_source_tree
from archtrace.llm import Cassette, LLMGateway, Mode, ScriptedProvider
from archtrace.model import load_component_list, load_sad

TOY = Path(__file__).resolve().parents[1] / "src" / "archtrace" / "data" / "toy"

DOC_ELABORATION = """The documentation describes a small two-layer application.
A graphical front end (Gui) renders the main window and forwards user input.
A Logic layer validates incoming requests and computes results, which the Gui displays.
The Gui does not access storage itself."""

CODE_ELABORATION = """The package structure shows two top-level packages.
Package gui holds the user-facing classes and depends on logic.
Package logic holds request validation and processing.
Possible components: Gui and Logic."""

NAME_LIST = "- Gui\n- Logic\n"

RECOGNITION = """1. Gui
   - Alternative names: none
   - Lines:
     - The system is split into a Gui component and a Logic component.
     - The Gui renders the main window and forwards user input.
     - Results computed by the Logic are displayed by the Gui.

2. Logic
   - Alternative names: none
   - Lines:
     - The system is split into a Gui component and a Logic component.
     - The Logic component validates every request before it is processed.
     - Results computed by the Logic are displayed by the Gui.

3. Storage
   - Alternative names: none
   - Lines:
     - The Gui never accesses storage directly."""

ENTITIES = [
    {
        "name": "Gui",
        "type": "COMPONENT",
        "alternativeNames": [],
        "occurrences": [
            "The system is split into a Gui component and a Logic component.",
            "The Gui renders the main window and forwards user input.",
            "Results computed by the Logic are displayed by the Gui.",
        ],
    },
    {
        "name": "Logic",
        "type": "COMPONENT",
        "alternativeNames": [],
        "occurrences": [
            "The system is split into a Gui component and a Logic component.",
            "The Logic component validates every request before it is processed.",
            "Results computed by the Logic are displayed by the Gui.",
        ],
    },
    {
        "name": "Storage",
        "type": "COMPONENT",
        "alternativeNames": [],
        "occurrences": ["The Gui never accesses storage directly."],
    },
]

# checked against the last user message, first match wins
SCRIPT = {
    "Last answer:": "```json\n" + json.dumps(ENTITIES, indent=2) + "\n```",
    "Identify all architecturally relevant": RECOGNITION,
    "elaborate on the following documentation": DOC_ELABORATION,
    "summarize the": CODE_ELABORATION,
    "aggregate the list": NAME_LIST,
    "only covers the component names": NAME_LIST,
}


def record(cassette_path: Path = TOY / "cassette.json") -> Cassette:
    if cassette_path.exists():
        cassette_path.unlink()
    cassette = Cassette.load(cassette_path, missing_ok=True)
    gateway = LLMGateway(Mode.RECORD, cassette, ScriptedProvider(SCRIPT))
    sad = load_sad(TOY / "sad.txt", "toy")
    code = scan_source_tree(TOY / "code")

    sams = [load_component_list(TOY / "sam.csv", "toy")]
    items = {"doc": sad, "code": code, "both": (sad, code)}
    for source, item in items.items():
        for aggregation in ("similarity", "prompt"):
            extractor = ComponentExtractor(gateway, source, aggregation, project="toy").fit()
            sams.append(extractor.transform([item])[0])
    for sam in sams:
        run_artemis(sad, sam, gateway)
    cassette.save()
    return cassette


if __name__ == "__main__":
    recorded = record()
    print(f"recorded {len(recorded)} entries")
