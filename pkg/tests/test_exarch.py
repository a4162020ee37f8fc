import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from archtrace.errors import EmptyExtractionError
from archtrace.exarch import (
    AggregationConfig,
    Casing,
    ComponentNameList,
    Source,
    aggregate_via_prompt,
    aggregate_via_similarity,
    aggregation_prompt,
    build_simple_sam,
    code_prompt,
    doc_prompt,
    extract_names_from_code,
    extract_names_from_sad,
    parse_component_list,
)
from archtrace.llm import Cassette, LLMGateway, Mode, ScriptedProvider
from archtrace.model import Provenance, SadDocument, load_sad
from archtrace.similarity import normalized_levenshtein_similarity

from conftest import FIXTURES, replay_gateway

GOLDEN = json.loads((FIXTURES / "parsing_golden.json").read_text())


@pytest.mark.parametrize("case", GOLDEN, ids=[c["name"] for c in GOLDEN])
def test_parsing_golden_suite(case):
    assert parse_component_list(case["response"], case["casing"]) == case["expected"]


def test_mediastore_replay():
    gateway = replay_gateway(FIXTURES / "mediastore" / "cassette.json")
    names = extract_names_from_sad(load_sad(FIXTURES / "mediastore" / "sad.txt", "MS"), gateway)
    assert names.source is Source.DOC
    assert {"Facade", "MediaAccess", "UserManagement"} <= set(names.names)
    sam = build_simple_sam(names, "MS")
    assert len(sam) == 11
    assert sam.provenance is Provenance.EXTRACTED_DOC


def test_jabref_replay_doc_and_code():
    gateway = replay_gateway(FIXTURES / "jabref" / "cassette.json")
    sad = load_sad(FIXTURES / "jabref" / "sad.txt", "JR")
    doc = extract_names_from_sad(sad, gateway)
    assert {"Cli", "Gui", "Logic", "Model", "Preferences", "EventBus"} <= set(doc.names)
    features = (FIXTURES / "jabref" / "features.txt").read_text().rstrip("\n")
    code = extract_names_from_code(features, gateway)
    assert code.source is Source.CODE
    assert {"GUI", "Logic", "Model", "Networking", "Preferences"} <= set(code.names)


def test_teammates_legacy_casing_replay():
    gateway = replay_gateway(FIXTURES / "teammates" / "cassette.json", model="gpt-4-turbo")
    features = (FIXTURES / "teammates" / "features.txt").read_text().rstrip("\n")
    names = extract_names_from_code(features, gateway, casing=Casing.LEGACY)
    assert "ArchitectureandMainEntryPoint" in names.names
    assert "UI" in names.names


def test_doc_chain_keeps_one_conversation():
    provider = ScriptedProvider({"elaborate": "An elaboration.", "only covers": "- Core"})
    gateway = LLMGateway(Mode.LIVE, provider=provider)
    sad = SadDocument.from_lines("p", ["The Core does everything."])
    assert extract_names_from_sad(sad, gateway).names == ("Core",)
    first, second = provider.calls
    assert len(first.messages) == 1 and first.messages[0].content == doc_prompt(sad)
    assert [m.role for m in second.messages] == ["user", "assistant", "user"]
    assert second.messages[1].content == "An elaboration."
    assert "The Core does everything." in first.messages[0].content


def test_code_chain_uses_feature_name_and_content():
    provider = ScriptedProvider({"summarize": "Summary.", "only covers": "- Core"})
    gateway = LLMGateway(Mode.LIVE, provider=provider)
    assert extract_names_from_code("Packages:\ncore", gateway).names == ("Core",)
    prompt = provider.calls[0].messages[0].content
    assert prompt == code_prompt("Packages:\ncore")
    assert "summarize the Packages" in prompt and prompt.endswith("Packages: core")


def test_empty_extraction_is_an_error():
    gateway = LLMGateway(Mode.LIVE, provider=ScriptedProvider({"": "I found nothing."}))
    with pytest.raises(EmptyExtractionError):
        extract_names_from_sad(SadDocument.from_lines("p", ["x"]), gateway)
    with pytest.raises(ValueError):
        extract_names_from_sad(SadDocument("p"), gateway)
    with pytest.raises(ValueError):
        extract_names_from_code("  ", gateway)


def test_similarity_aggregation_examples():
    assert aggregate_via_similarity(["Database"], ["DB"]).names == ("Database", "DB")
    assert aggregate_via_similarity(["UserManagement"], ["UserManagment"]).names == ("UserManagement",)
    assert aggregate_via_similarity(["Gui"], ["GUI"], AggregationConfig(1.0)).names == ("Gui",)
    assert aggregate_via_similarity(["A", "B"], [], AggregationConfig(0.0)).names == ("A", "B")


def test_prompt_aggregation():
    provider = ScriptedProvider({"aggregate": "- Gui\n- Logic"})
    gateway = LLMGateway(Mode.LIVE, provider=provider)
    result = aggregate_via_prompt(["Gui", "Logic"], ["GUI"], gateway)
    assert result.names == ("Gui", "Logic")
    assert result.source is Source.COMBINED_PROMPT
    assert provider.calls[0].messages[0].content == aggregation_prompt(["Gui", "Logic", "GUI"])
    assert "Possible component names: Gui, Logic, GUI" in aggregation_prompt(["Gui", "Logic", "GUI"])


def test_build_simple_sam_ids():
    sam = build_simple_sam(ComponentNameList(("A", "B"), Source.DOC), "p")
    assert [(c.id, c.name) for c in sam] == [("x-0", "A"), ("x-1", "B")]


def test_name_list_validation():
    with pytest.raises(ValueError):
        ComponentNameList(("A", "A"), Source.DOC)
    with pytest.raises(ValueError):
        AggregationConfig(1.5)


names = st.lists(st.text(alphabet="abcdeABC", min_size=1, max_size=8), max_size=8)


@given(names, names, st.floats(min_value=0.0, max_value=1.0))
def test_similarity_aggregation_properties(doc, code, t):
    config = AggregationConfig(t)
    out = aggregate_via_similarity(doc, code, config).names
    for i, a in enumerate(out):
        for b in out[i + 1:]:
            assert normalized_levenshtein_similarity(a, b) <= t
            assert a.lower() != b.lower()
    candidates = [*doc, *code]
    positions = [candidates.index(n) for n in out]
    assert positions == sorted(positions)
    assert aggregate_via_similarity(out, [], config).names == out


def test_similarity_aggregation_randomized_sequential_rule():
    rng = random.Random(3)
    for _ in range(200):
        pool = ["".join(rng.choice("abAB") for _ in range(rng.randint(1, 6))) for _ in range(10)]
        doc, code = pool[:5], pool[5:]
        t = rng.random()
        expected = []
        for n in pool:
            if all(n.lower() != k.lower() and normalized_levenshtein_similarity(n, k) <= t for k in expected):
                expected.append(n)
        assert list(aggregate_via_similarity(doc, code, AggregationConfig(t)).names) == expected
