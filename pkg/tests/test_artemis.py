import json

import pytest

from archtrace.artemis import (
    MatchConfig,
    RETRY_NOTE,
    RecognizedEntity,
    format_entities,
    format_prompt,
    map_occurrence_to_sentence,
    match_entities_to_sam,
    parse_entities,
    recognize_entities,
    resolve_occurrences,
    run_artemis,
    score_pair,
    task_prompt,
)
from archtrace.errors import MalformedResponseError, PipelineError
from archtrace.exarch import prompt_template
from archtrace.llm import LLMGateway, Mode, ScriptedProvider, offline_embedding
from archtrace.model import Component, LinkKind, SadDocument, Sam, load_component_list, load_gold_links, load_sad
from archtrace.evaluation import confusion_counts, precision_recall_f1
from archtrace.similarity import cosine_similarity, jaro_winkler_similarity, normalized_levenshtein_similarity

from conftest import FIXTURES, replay_gateway


def example_json() -> str:
    """The worked example at the end of the shipped formatting prompt."""
    return prompt_template("artemis_format").split("Example:", 1)[1]


SAD = SadDocument.from_lines("p", [
    "The AuthenticationService handles login requests.",
    "It forwards valid credentials to the UserDatabase.",
    "The service logs each attempt.",
    "The DB then validates the credentials.",
    "It forwards valid credentials to the UserDatabase.",
])


def test_example_parses_to_two_entities():
    entities = parse_entities(example_json())
    assert [e.name for e in entities] == ["AuthenticationService", "UserDatabase"]
    assert entities[0].alternative_names == ("service",)
    assert len(entities[0].occurrences) == 3
    assert entities[1].alternative_names == ("DB",)
    assert len(entities[1].occurrences) == 2


def test_parse_tolerates_prose_and_fences():
    text = "Here you go:\n```json\n" + json.dumps([{"name": "A"}]) + "\n```\nDone [1]."
    (entity,) = parse_entities(text)
    assert entity == RecognizedEntity("A")
    assert parse_entities("[]") == []
    assert parse_entities("see [1, 2] and then []") == []


@pytest.mark.parametrize("text", [
    "no json here",
    '[{"type": "COMPONENT"}]',
    '[{"name": "A", "occurrences": "not a list"}]',
    '[{"name": "A", "type": 3}]',
])
def test_parse_rejects_malformed(text):
    with pytest.raises(MalformedResponseError):
        parse_entities(text)


def test_occurrence_mapping():
    assert map_occurrence_to_sentence("The service logs each attempt.", SAD) == 3
    assert map_occurrence_to_sentence("  The service logs each attempt. ", SAD) == 3
    assert map_occurrence_to_sentence("It forwards valid credentials to the UserDatabase.", SAD) == 2
    assert map_occurrence_to_sentence("The DB then validates the credentails.", SAD) == 4
    assert map_occurrence_to_sentence("something unrelated entirely", SAD) in SAD.sentence_ids()


def test_occurrence_typo_matches_similarity_oracle():
    typo = "The DB then validates the credentails."
    scores = {s.id: normalized_levenshtein_similarity(typo, s.text) for s in SAD}
    best = max(scores.values())
    assert map_occurrence_to_sentence(typo, SAD) == min(i for i, v in scores.items() if v == best)


def test_match_examples():
    gateway = LLMGateway(Mode.REPLAY)
    sam = Sam("p", (Component("c1", "Logic"), Component("c2", "Database"), Component("c3", "Packaging")))
    entities = [
        RecognizedEntity("Logic", resolved_sentences=(1,)),
        RecognizedEntity("DB", ("Database",), resolved_sentences=(2, 3)),
        RecognizedEntity("UserDBAdapter", resolved_sentences=(4,)),
    ]
    links = match_entities_to_sam(entities, sam, gateway)
    assert links.sorted_pairs() == [("1", "c1"), ("2", "c2"), ("3", "c2")]


def test_unrelated_names_stay_below_every_threshold():
    a, b = "userdbadapter", "packaging"
    config = MatchConfig()
    assert jaro_winkler_similarity(a, b) <= config.jaro_winkler_threshold
    assert normalized_levenshtein_similarity(a, b) <= config.levenshtein_threshold
    assert cosine_similarity(offline_embedding(a), offline_embedding(b)) <= config.cosine_threshold
    scores = score_pair(["UserDBAdapter"], "Packaging", {a: offline_embedding(a), b: offline_embedding(b)})
    assert not scores.matched(config)


def test_exact_name_always_matches():
    strict = MatchConfig(1.0, 1.0, 1.0)
    assert score_pair(["GUI"], "Gui", {"gui": [1.0]}).matched(strict)


def test_matching_is_monotone_in_thresholds():
    gateway = LLMGateway(Mode.REPLAY)
    sam = Sam("p", tuple(Component(f"c{i}", n) for i, n in enumerate(["Cache", "Caching", "Store", "Storage"])))
    entities = [RecognizedEntity(n, resolved_sentences=(i + 1,))
                for i, n in enumerate(["cache", "Stores", "Storage Layer", "Misc"])]
    previous = None
    for t in (1.0, 0.95, 0.9, 0.8, 0.7, 0.5, 0.0):
        links = match_entities_to_sam(entities, sam, gateway, MatchConfig(t, t, t)).pairs()
        if previous is not None:
            assert previous <= links
        previous = links


def test_task_prompt_lists_known_names():
    prompt = task_prompt(SAD, ["Gui", "Logic"])
    assert prompt.startswith(prompt_template("artemis_task").rstrip("\n"))
    assert SAD.text in prompt
    assert prompt.endswith("Known component names to look out for:\n- Gui\n- Logic")
    assert "Known component names" not in task_prompt(SAD)


def test_recognize_and_format_pass_text_through():
    provider = ScriptedProvider({"Last answer:": example_json(), "Identify all": "AuthenticationService ..."})
    gateway = LLMGateway(Mode.LIVE, provider=provider)
    plain = recognize_entities(SAD, ["AuthenticationService"], gateway)
    assert "AuthenticationService" in plain
    assert format_entities(plain, gateway) == example_json()
    assert provider.calls[1].messages[0].content == format_prompt(plain)
    with pytest.raises(ValueError):
        recognize_entities(SadDocument("p"), [], gateway)


def _two_shot_provider(first_format, retry_format):
    def script(request):
        last = request.messages[-1].content
        if last == RETRY_NOTE:
            return retry_format
        if "Last answer:" in last:
            return first_format
        return "plain answer"
    return ScriptedProvider(script)


def test_formatting_is_retried_once():
    provider = _two_shot_provider("not json", json.dumps([
        {"name": "UserDatabase", "occurrences": ["The DB then validates the credentials."]}]))
    gateway = LLMGateway(Mode.LIVE, provider=provider)
    sam = Sam("p", (Component("db", "UserDatabase"),))
    assert run_artemis(SAD, sam, gateway).sorted_pairs() == [("4", "db")]
    assert len(provider.calls) == 3


def test_formatting_failure_after_retry_names_the_stage():
    gateway = LLMGateway(Mode.LIVE, provider=_two_shot_provider("nope", "still nope"))
    with pytest.raises(PipelineError) as info:
        run_artemis(SAD, Sam("p", (Component("a", "A"),)), gateway)
    assert info.value.stage == "artemis-format"


def test_empty_model_needs_no_llm():
    provider = ScriptedProvider({})
    assert len(run_artemis(SAD, Sam("p"), LLMGateway(Mode.LIVE, provider=provider))) == 0
    assert provider.calls == []


def test_jabref_replay_against_gold(tmp_path):
    base = FIXTURES / "jabref"
    sad = load_sad(base / "sad.txt", "JR")
    sam = load_component_list(base / "sam.csv", "JR")
    out = tmp_path / "entities.json"
    links = run_artemis(sad, sam, replay_gateway(base / "cassette.json"), entities_out=out)
    assert links == run_artemis(sad, sam, replay_gateway(base / "cassette.json"))
    for link in links:
        assert int(link.left) in sad.sentence_ids() and link.right in sam.component_ids()
    metrics = precision_recall_f1(confusion_counts(links, load_gold_links(base / "gold_sad_sam.csv", "sad-sam")))
    assert metrics.precision == 1.0
    assert metrics.recall == pytest.approx(12 / 13)
    names = [e["name"] for e in json.loads(out.read_text())]
    assert "GUI" in names and "Logic" in names


def test_resolve_occurrences():
    entities = resolve_occurrences(parse_entities(example_json()), SAD)
    assert entities[0].resolved_sentences == (1, 2, 3)
    assert entities[1].resolved_sentences == (2, 4)
    assert all(link.kind is LinkKind.SAD_SAM for link in match_entities_to_sam(
        entities, Sam("p", (Component("a", "AuthenticationService"),)), LLMGateway(Mode.REPLAY)))
