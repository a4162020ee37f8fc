"""Evaluation against gold standards: counts, metrics, averages and significance."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Sequence

from .errors import KindMismatchError, UndefinedTestError
from .model import GoldStandard, LinkSet

REPORT_VERSION = 1
PROJECT_ORDER = ("MS", "TS", "TM", "BBB", "JR")
EXACT_LIMIT = 20
ALPHA = 0.05


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ProjectResult:
    project: str
    metrics: Metrics
    gold_link_count: int

    def __post_init__(self):
        if self.gold_link_count < 1:
            raise ValueError(f"{self.project}: gold link count must be at least 1")


def confusion_counts(found: LinkSet, gold: GoldStandard | LinkSet) -> ConfusionCounts:
    gold_links = gold.links if isinstance(gold, GoldStandard) else gold
    if found.kind != gold_links.kind:
        raise KindMismatchError(f"found {found.kind.value} links but gold is {gold_links.kind.value}")
    found_pairs, gold_pairs = found.pairs(), gold_links.pairs()
    return ConfusionCounts(
        tp=len(found_pairs & gold_pairs),
        fp=len(found_pairs - gold_pairs),
        fn=len(gold_pairs - found_pairs),
    )


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def precision_recall_f1(counts: ConfusionCounts) -> Metrics:
    """Precision, recall and F1, with the empty cases defined.

    Nothing found and nothing expected scores 1 everywhere; nothing found while
    links were expected gives precision 0.
    """
    if counts.tp + counts.fp == 0:
        precision = 1.0 if counts.fn == 0 else 0.0
    else:
        precision = counts.tp / (counts.tp + counts.fp)
    if counts.tp + counts.fn == 0:
        recall = 1.0 if counts.fp == 0 else 0.0
    else:
        recall = counts.tp / (counts.tp + counts.fn)
    return Metrics(precision, recall, f1_score(precision, recall))


def evaluate(project: str, found: LinkSet, gold: GoldStandard) -> ProjectResult:
    return ProjectResult(project, precision_recall_f1(confusion_counts(found, gold)), max(len(gold), 1))


def macro_average(results: Sequence[ProjectResult]) -> Metrics:
    if not results:
        raise ValueError("cannot average an empty result list")
    n = len(results)
    return Metrics(
        math.fsum(r.metrics.precision for r in results) / n,
        math.fsum(r.metrics.recall for r in results) / n,
        math.fsum(r.metrics.f1 for r in results) / n,
    )


def weighted_average(results: Sequence[ProjectResult]) -> Metrics:
    """Each metric averaged independently, weighted by gold link counts."""
    if not results:
        raise ValueError("cannot average an empty result list")
    total = sum(r.gold_link_count for r in results)
    if len({r.gold_link_count for r in results}) == 1:
        return macro_average(results)

    def mean(attr):
        return math.fsum(getattr(r.metrics, attr) * r.gold_link_count for r in results) / total

    return Metrics(mean("precision"), mean("recall"), mean("f1"))


# -- significance -------------------------------------------------------------


@dataclass(frozen=True)
class WilcoxonResult:
    p: float
    exact: bool
    statistic: float
    n: int


def _average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _exact_upper_tail(statistic: float, n: int) -> float:
    # null distribution of the signed-rank sum, counted over all 2**n sign patterns
    max_sum = n * (n + 1) // 2
    counts = [1] + [0] * max_sum
    for rank in range(1, n + 1):
        for s in range(max_sum, rank - 1, -1):
            counts[s] += counts[s - rank]
    threshold = math.ceil(statistic - 1e-9)
    return sum(counts[threshold:]) / 2 ** n


def wilcoxon_one_sided(differences: Sequence[float]) -> WilcoxonResult:
    """One-sided signed-rank test of ``differences > 0``.

    Zero differences are dropped. The p-value is exact for at most 20
    observations without ties or zeros; otherwise it uses the normal
    approximation with tie and continuity correction.
    """
    if len(differences) < 1:
        raise UndefinedTestError("need at least one difference")
    nonzero = [float(d) for d in differences if d != 0]
    if not nonzero:
        raise UndefinedTestError("all differences are zero")
    had_zeros = len(nonzero) != len(differences)
    n = len(nonzero)
    magnitudes = [abs(d) for d in nonzero]
    ranks = _average_ranks(magnitudes)
    w_plus = math.fsum(r for r, d in zip(ranks, nonzero) if d > 0)
    has_ties = len(set(magnitudes)) != n

    if n <= EXACT_LIMIT and not has_ties and not had_zeros:
        return WilcoxonResult(_exact_upper_tail(w_plus, n), True, w_plus, n)

    mean = n * (n + 1) / 4
    tie_term = 0.0
    for value in set(magnitudes):
        t = magnitudes.count(value)
        tie_term += t ** 3 - t
    variance = n * (n + 1) * (2 * n + 1) / 24 - tie_term / 48
    if variance <= 0:
        raise UndefinedTestError("zero variance in the signed-rank statistic")
    z = (w_plus - mean - 0.5) / math.sqrt(variance)
    p = 0.5 * math.erfc(z / math.sqrt(2))
    return WilcoxonResult(p, False, w_plus, n)


@dataclass(frozen=True)
class Comparison:
    name: str
    differences: tuple[float, ...]

    @classmethod
    def from_scores(cls, name, ours: Sequence[float], baseline: Sequence[float]) -> "Comparison":
        if len(ours) != len(baseline):
            raise ValueError("score lists must have equal length")
        return cls(name, tuple(a - b for a, b in zip(ours, baseline)))


# -- reporting ------------------------------------------------------------------


def display(value: float, places: int = 2) -> str:
    """Round half-up to ``places`` decimals and drop the leading zero (``.87``)."""
    text = str(Decimal(repr(value)).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))
    if text.startswith("0."):
        text = text[1:]
    return text


def _ordered(results):
    rank = {name: i for i, name in enumerate(PROJECT_ORDER)}
    return sorted(results, key=lambda r: rank.get(r.project, len(rank)))


def build_report(results: Sequence[ProjectResult], comparisons: Sequence[Comparison] = ()) -> dict:
    results = _ordered(results)
    report = {
        "version": REPORT_VERSION,
        "projects": [
            {"project": r.project, "goldLinkCount": r.gold_link_count, **asdict(r.metrics)}
            for r in results
        ],
        "average": asdict(macro_average(results)) if results else None,
        "weightedAverage": asdict(weighted_average(results)) if results else None,
        "significance": [],
    }
    for comparison in comparisons:
        test = wilcoxon_one_sided(comparison.differences)
        report["significance"].append({
            "name": comparison.name,
            "p": test.p,
            "exact": test.exact,
            "statistic": test.statistic,
            "n": test.n,
            "significant": test.p < ALPHA,
        })
    return report


def render_text(report: dict) -> str:
    rows = [("", "P", "R", "F1")]
    for entry in report["projects"]:
        rows.append((entry["project"], *(display(entry[k]) for k in ("precision", "recall", "f1"))))
    if report["average"] is not None:
        rows.append(("Avg", *(display(report["average"][k]) for k in ("precision", "recall", "f1"))))
        rows.append(("w. Avg", *(display(report["weightedAverage"][k]) for k in ("precision", "recall", "f1"))))
    width = max(len(r[0]) for r in rows)
    lines = [f"{r[0]:<{width}}  {r[1]:>5}  {r[2]:>5}  {r[3]:>5}".rstrip() for r in rows]
    if report["significance"]:
        lines += ["", "One-sided Wilcoxon signed-rank test (alpha = 0.05, * = approximate)"]
        name_width = max(len(s["name"]) for s in report["significance"])
        for s in report["significance"]:
            p = display(s["p"], 3) + ("" if s["exact"] else "*")
            verdict = "significant" if s["significant"] else "not significant"
            lines.append(f"{s['name']:<{name_width}}  p={p:<6} {verdict}")
    return "\n".join(lines) + "\n"


def write_report(report: dict, json_path, text_path=None) -> None:
    Path(json_path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if text_path is not None:
        Path(text_path).write_text(render_text(report), encoding="utf-8")
