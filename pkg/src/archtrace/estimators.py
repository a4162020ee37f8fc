"""scikit-learn style wrappers around the extraction and linking stages.

Each wrapper keeps its settings as constructor parameters (so ``get_params`` /
``set_params`` / ``clone`` work) and learns nothing beyond storing the model it
was fitted on::

    linker = SamCodeLinker(threshold=0.7).fit(sam)
    links = linker.predict(code_model)
"""

from __future__ import annotations

from dataclasses import dataclass

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import artemis, codelink, exarch
from ._validation import check_code_paths, check_links, check_sad, check_sam, check_threshold
from .errors import ArchTraceError, PipelineError
from .evaluation import confusion_counts, precision_recall_f1
from .features import CodeModel, extract_packages, render_feature_text
from .model import LinkKind, LinkSet, SadDocument, Sam
from .transitive import compose_links

SOURCES = ("doc", "code", "both")
AGGREGATIONS = ("similarity", "prompt")


def _f1(found: LinkSet, gold, kind: LinkKind) -> float:
    return precision_recall_f1(confusion_counts(found, check_links(gold, kind))).f1


def _gateway(gateway):
    if gateway is None:
        raise ValueError("an LLMGateway is required for this estimator")
    return gateway


def _feature_text(code) -> str:
    if isinstance(code, CodeModel):
        return render_feature_text(extract_packages(code))
    if isinstance(code, str):
        return code
    raise TypeError("code features must be a CodeModel or rendered feature text")


class ComponentExtractor(TransformerMixin, BaseEstimator):
    """Turn documentation and/or code into simple component models.

    ``transform`` takes a batch: documentation for ``source="doc"``, code models
    or feature text for ``"code"``, and ``(documentation, code)`` pairs for
    ``"both"``. It returns one :class:`Sam` per input.
    """

    def __init__(self, gateway=None, source="doc", aggregation="similarity", threshold=0.5,
                 casing="strict-camel", project="project"):
        self.gateway = gateway
        self.source = source
        self.aggregation = aggregation
        self.threshold = threshold
        self.casing = casing
        self.project = project

    def fit(self, X=None, y=None):
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}, got {self.aggregation!r}")
        check_threshold(self.threshold, "threshold")
        exarch.Casing(self.casing)
        self.fitted_ = True
        return self

    def extract_names(self, item) -> exarch.ComponentNameList:
        gateway = _gateway(self.gateway)
        if self.source == "doc":
            return exarch.extract_names_from_sad(check_sad(item, self.project), gateway, casing=self.casing)
        if self.source == "code":
            return exarch.extract_names_from_code(_feature_text(item), gateway, casing=self.casing)
        sad, code = item
        doc_names = exarch.extract_names_from_sad(check_sad(sad, self.project), gateway, casing=self.casing)
        code_names = exarch.extract_names_from_code(_feature_text(code), gateway, casing=self.casing)
        if self.aggregation == "prompt":
            return exarch.aggregate_via_prompt(doc_names.names, code_names.names, gateway, casing=self.casing)
        config = exarch.AggregationConfig(self.threshold, self.casing)
        return exarch.aggregate_via_similarity(doc_names.names, code_names.names, config)

    def _project_of(self, item):
        sad = item[0] if self.source == "both" else item
        return sad.project if isinstance(sad, SadDocument) else self.project

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        return [exarch.build_simple_sam(self.extract_names(item), self._project_of(item)) for item in X]


class ArtemisLinker(BaseEstimator):
    """Documentation-to-model linking via entity recognition and name matching."""

    def __init__(self, gateway=None, jaro_winkler_threshold=0.90, levenshtein_threshold=0.80,
                 cosine_threshold=0.85):
        self.gateway = gateway
        self.jaro_winkler_threshold = jaro_winkler_threshold
        self.levenshtein_threshold = levenshtein_threshold
        self.cosine_threshold = cosine_threshold

    def _config(self) -> artemis.MatchConfig:
        return artemis.MatchConfig(
            check_threshold(self.jaro_winkler_threshold, "jaro_winkler_threshold"),
            check_threshold(self.levenshtein_threshold, "levenshtein_threshold"),
            check_threshold(self.cosine_threshold, "cosine_threshold"),
        )

    def fit(self, sam, y=None):
        self._config()
        self.sam_ = check_sam(sam)
        return self

    def predict(self, sad, entities_out=None) -> LinkSet:
        check_is_fitted(self, "sam_")
        return artemis.run_artemis(check_sad(sad), self.sam_, _gateway(self.gateway), self._config(),
                                   entities_out=entities_out)

    def score(self, sad, gold) -> float:
        return _f1(self.predict(sad), gold, LinkKind.SAD_SAM)


class SamCodeLinker(BaseEstimator):
    """Heuristic model-to-code linking over package paths."""

    def __init__(self, threshold=codelink.DEFAULT_LINK_THRESHOLD,
                 dominance_band=codelink.DEFAULT_DOMINANCE_BAND):
        self.threshold = threshold
        self.dominance_band = dominance_band

    def fit(self, sam, y=None):
        check_threshold(self.threshold, "threshold")
        check_threshold(self.dominance_band, "dominance_band")
        self.sam_ = check_sam(sam)
        return self

    def predict_candidates(self, code) -> list[codelink.LinkCandidate]:
        check_is_fitted(self, "sam_")
        return [
            candidate
            for path in check_code_paths(code)
            for candidate in codelink.file_candidates(self.sam_, path, self.threshold, self.dominance_band)
        ]

    def predict(self, code) -> LinkSet:
        check_is_fitted(self, "sam_")
        return codelink.link_sam_to_code(self.sam_, check_code_paths(code), self.threshold, self.dominance_band)

    def score(self, code, gold) -> float:
        return _f1(self.predict(code), gold, LinkKind.SAM_CODE)


@dataclass(frozen=True)
class TraceResult:
    sam: Sam
    sad_sam: LinkSet
    sam_code: LinkSet
    sad_code: LinkSet


class TraceLinkRecovery(BaseEstimator):
    """End-to-end documentation-to-code linking through an intermediate model.

    ``fit(code, sam=None)`` stores the scanned code and, optionally, a
    hand-made model. Without one, :meth:`trace` extracts a model from the
    documentation, the code features, or both, according to ``source``.
    """

    def __init__(self, gateway=None, source="doc", aggregation="similarity", threshold=0.5,
                 casing="strict-camel", jaro_winkler_threshold=0.90, levenshtein_threshold=0.80,
                 cosine_threshold=0.85, link_threshold=codelink.DEFAULT_LINK_THRESHOLD,
                 dominance_band=codelink.DEFAULT_DOMINANCE_BAND):
        self.gateway = gateway
        self.source = source
        self.aggregation = aggregation
        self.threshold = threshold
        self.casing = casing
        self.jaro_winkler_threshold = jaro_winkler_threshold
        self.levenshtein_threshold = levenshtein_threshold
        self.cosine_threshold = cosine_threshold
        self.link_threshold = link_threshold
        self.dominance_band = dominance_band

    def fit(self, code, sam=None):
        if not isinstance(code, CodeModel):
            raise TypeError("fit() expects a scanned CodeModel")
        self.code_ = code
        self.sam_ = check_sam(sam) if sam is not None else None
        return self

    def _extractor(self, project):
        return ComponentExtractor(self.gateway, self.source, self.aggregation, self.threshold,
                                  self.casing, project).fit()

    def trace(self, sad) -> TraceResult:
        check_is_fitted(self, "code_")
        sad = check_sad(sad)
        sam = self.sam_
        if sam is None:
            if self.source == "doc":
                item = sad
            elif self.source == "code":
                item = self.code_
            else:
                item = (sad, self.code_)
            try:
                sam = self._extractor(sad.project).transform([item])[0]
            except ArchTraceError as exc:
                raise PipelineError("extract-sam", str(exc)) from exc
        try:
            sad_sam = ArtemisLinker(self.gateway, self.jaro_winkler_threshold, self.levenshtein_threshold,
                                    self.cosine_threshold).fit(sam).predict(sad)
        except PipelineError:
            raise
        except ArchTraceError as exc:
            raise PipelineError("artemis", str(exc)) from exc
        sam_code = SamCodeLinker(self.link_threshold, self.dominance_band).fit(sam).predict(self.code_)
        return TraceResult(sam, sad_sam, sam_code, compose_links(sad_sam, sam_code))

    def predict(self, sad) -> LinkSet:
        return self.trace(sad).sad_code

    def score(self, sad, gold) -> float:
        return _f1(self.predict(sad), gold, LinkKind.SAD_CODE)
