"""Trace links from architecture documentation to code via an LLM-extracted component model."""

from .artemis import MatchConfig, RecognizedEntity, parse_entities, run_artemis
from .codelink import link_sam_to_code
from .errors import (
    ArchTraceError,
    CassetteMissError,
    FormatError,
    GatewayError,
    KindMismatchError,
    MalformedResponseError,
    PipelineError,
    UndefinedTestError,
)
from .estimators import ArtemisLinker, ComponentExtractor, SamCodeLinker, TraceLinkRecovery, TraceResult
from .evaluation import (
    ConfusionCounts,
    Metrics,
    ProjectResult,
    WilcoxonResult,
    evaluate,
    macro_average,
    precision_recall_f1,
    weighted_average,
    wilcoxon_one_sided,
)
from .exarch import (
    aggregate_via_prompt,
    aggregate_via_similarity,
    build_simple_sam,
    extract_names_from_code,
    extract_names_from_sad,
    parse_component_list,
)
from .features import CodeModel, ScanConfig, extract_packages, scan_source_tree
from .llm import Cassette, LLMGateway, Mode, ScriptedProvider
from .model import (
    CodeArtifact,
    Component,
    GoldStandard,
    LinkKind,
    LinkSet,
    SadDocument,
    Sam,
    Sentence,
    TraceLink,
    load_component_list,
    load_gold_links,
    load_links,
    load_sad,
    write_links,
)
from .transitive import compose_links

__version__ = "0.1.0"
