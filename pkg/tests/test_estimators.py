import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from archtrace.errors import PipelineError
from archtrace.estimators import ArtemisLinker, ComponentExtractor, SamCodeLinker, TraceLinkRecovery
from archtrace.features import scan_source_tree
from archtrace.llm import LLMGateway, Mode, ScriptedProvider
from archtrace.model import LinkKind, Provenance, load_component_list, load_gold_links, load_sad

from conftest import TOY, replay_gateway


@pytest.fixture
def toy():
    return {
        "gateway": replay_gateway(TOY / "cassette.json"),
        "sad": load_sad(TOY / "sad.txt", "toy"),
        "sam": load_component_list(TOY / "sam.csv", "toy"),
        "code": scan_source_tree(TOY / "code"),
    }


def test_params_and_clone(toy):
    extractor = ComponentExtractor(toy["gateway"], source="both", threshold=0.4)
    assert extractor.get_params()["threshold"] == 0.4
    copy = clone(extractor)
    assert copy.gateway is toy["gateway"]
    assert copy.set_params(threshold=0.7).threshold == 0.7
    assert clone(TraceLinkRecovery(toy["gateway"])).get_params()["source"] == "doc"


def test_validation_happens_in_fit():
    with pytest.raises(ValueError):
        ComponentExtractor(source="slides").fit()
    with pytest.raises(ValueError):
        ComponentExtractor(threshold=2).fit()
    with pytest.raises(TypeError):
        SamCodeLinker(threshold="high").fit(["A"])
    with pytest.raises(NotFittedError):
        SamCodeLinker().predict(["a/B.java"])


@pytest.mark.parametrize("source", ["doc", "code", "both"])
@pytest.mark.parametrize("aggregation", ["similarity", "prompt"])
def test_extractor_on_toy(toy, source, aggregation):
    item = {"doc": toy["sad"], "code": toy["code"], "both": (toy["sad"], toy["code"])}[source]
    (sam,) = ComponentExtractor(toy["gateway"], source, aggregation, project="toy").fit().transform([item])
    assert sam.names == ["Gui", "Logic"]
    assert sam.project == "toy"
    expected = {"doc": Provenance.EXTRACTED_DOC, "code": Provenance.EXTRACTED_CODE}
    assert sam.provenance is expected.get(source, Provenance.EXTRACTED_COMBINED)


def test_linkers_accept_plain_lists():
    linker = SamCodeLinker().fit(["Gui", "Logic"])
    assert linker.predict(["gui/A.java", "logic/B.java"]).sorted_pairs() == [
        ("x-0", "gui/A.java"), ("x-1", "logic/B.java")]
    candidates = linker.predict_candidates(["gui/A.java"])
    assert [c.component_id for c in candidates] == ["x-0"]


def test_artemis_linker_on_toy(toy):
    linker = ArtemisLinker(toy["gateway"]).fit(toy["sam"])
    gold = load_gold_links(TOY / "gold_sad_sam.csv", LinkKind.SAD_SAM)
    assert linker.score(toy["sad"], gold) == pytest.approx(12 / 13)


def test_trace_with_manual_and_extracted_models(toy):
    gold = load_gold_links(TOY / "gold_sad_code.csv", LinkKind.SAD_CODE)
    manual = TraceLinkRecovery(toy["gateway"]).fit(toy["code"], toy["sam"])
    extracted = TraceLinkRecovery(toy["gateway"]).fit(toy["code"])
    assert manual.score(toy["sad"], gold) == pytest.approx(12 / 13)
    assert extracted.score(toy["sad"], gold) == pytest.approx(12 / 13)
    result = extracted.trace(toy["sad"])
    assert result.sam.names == ["Gui", "Logic"]
    assert len(result.sad_code) == 12


def test_trace_names_failing_stage(toy):
    gateway = LLMGateway(Mode.LIVE, provider=ScriptedProvider({"": "no list here"}))
    with pytest.raises(PipelineError) as info:
        TraceLinkRecovery(gateway).fit(toy["code"]).trace(toy["sad"])
    assert info.value.stage == "extract-sam"
    with pytest.raises(PipelineError) as info:
        TraceLinkRecovery(gateway).fit(toy["code"], toy["sam"]).trace(toy["sad"])
    assert info.value.stage == "artemis-format"
