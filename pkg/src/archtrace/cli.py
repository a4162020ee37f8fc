"""Command-line interface.

Exit codes: 0 success, 1 pipeline error (message names the failing stage),
2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import config as cfg
from .artemis import MatchConfig, run_artemis
from .codelink import link_sam_to_code
from .errors import ArchTraceError, PipelineError
from .estimators import ComponentExtractor, TraceLinkRecovery
from .evaluation import Comparison, build_report, evaluate, render_text, write_report
from .features import ScanConfig, render_feature_text, scan_source_tree
from .llm import Cassette, LLMGateway, Mode, OpenAICompatibleProvider
from .model import (
    LinkKind,
    links_to_csv,
    load_component_list,
    load_gold_links,
    load_links,
    load_sad,
)

logger = logging.getLogger("archtrace")


class UsageError(Exception):
    pass


@contextlib.contextmanager
def stage(name):
    """Re-raise failures inside a step as a :class:`PipelineError` naming it."""
    try:
        yield
    except PipelineError:
        raise
    except (ArchTraceError, OSError, ValueError) as exc:
        raise PipelineError(name, str(exc)) from exc


# -- argument parsing ----------------------------------------------------------


def _global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    g = parent.add_argument_group("global options")
    g.add_argument("--config", help="key=value configuration file")
    g.add_argument("--llm-mode", choices=[m.value for m in Mode], default=None)
    g.add_argument("--cassette", help="cassette file for record/replay")
    g.add_argument("--out", help="output directory (default: print to stdout)")
    g.add_argument("-v", "--verbose", action="store_true")
    return parent


def _extraction_flags(p):
    p.add_argument("--mode", choices=["doc", "code", "both"], default=None)
    p.add_argument("--aggregation", choices=["prompt", "similarity"], default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--casing", choices=["strict-camel", "legacy-space-removal"], default=None)


def _scan_flags(p):
    p.add_argument("--exclude-test-code", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parent = _global_flags()
    parser = argparse.ArgumentParser(prog="archtrace", description="Architecture-based trace link recovery.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("scan", parents=[parent], help="summarize a source tree")
    p.add_argument("root")
    _scan_flags(p)

    p = sub.add_parser("extract-sam", parents=[parent], help="extract component names with an LLM")
    p.add_argument("--sad", help="documentation file (modes doc/both)")
    p.add_argument("--root", help="source tree (modes code/both)")
    p.add_argument("--project")
    _extraction_flags(p)
    _scan_flags(p)

    p = sub.add_parser("artemis", parents=[parent], help="link documentation sentences to components")
    p.add_argument("--sad", required=True)
    p.add_argument("--sam", required=True)
    p.add_argument("--entities-out", help="also dump recognized entities as JSON")

    p = sub.add_parser("codelink", parents=[parent], help="link components to source files")
    p.add_argument("--sam", required=True)
    p.add_argument("--root", required=True)
    p.add_argument("--link-threshold", type=float, default=None)
    _scan_flags(p)

    p = sub.add_parser("trace", parents=[parent], help="documentation-to-code links end to end")
    p.add_argument("--sad", required=True)
    p.add_argument("--root", required=True)
    p.add_argument("--sam", help="hand-made component list; extracted when omitted")
    p.add_argument("--project")
    p.add_argument("--gold", help="gold documentation-to-code links to evaluate against")
    p.add_argument("--gold-sad-sam", help="gold documentation-to-model links")
    p.add_argument("--gold-sam-code", help="gold model-to-code links")
    p.add_argument("--link-threshold", type=float, default=None)
    _extraction_flags(p)
    _scan_flags(p)

    p = sub.add_parser("eval", parents=[parent], help="precision/recall/F1 against a gold standard")
    p.add_argument("--found", action="append", required=True, help="found links (repeatable)")
    p.add_argument("--gold", action="append", required=True, help="gold links (repeatable)")
    p.add_argument("--project", action="append", help="project name per --found (repeatable)")
    p.add_argument("--kind", choices=[k.value for k in LinkKind], default=LinkKind.SAD_CODE.value)

    p = sub.add_parser("significance", parents=[parent], help="one-sided Wilcoxon signed-rank test")
    p.add_argument("--ours", required=True, help="CSV project,score")
    p.add_argument("--baseline", required=True, help="CSV project,score")
    p.add_argument("--name", default=None)
    return parser


# -- helpers -------------------------------------------------------------------


def _settings(args) -> dict:
    file_values = cfg.load_config(args.config) if args.config else {}
    flags = {
        "llm-mode": args.llm_mode,
        "cassette-path": args.cassette,
        "mode": getattr(args, "mode", None),
        "aggregation": getattr(args, "aggregation", None),
        "threshold": getattr(args, "threshold", None),
        "casing": getattr(args, "casing", None),
        "link-threshold": getattr(args, "link_threshold", None),
        "exclude-test-code": getattr(args, "exclude_test_code", None),
    }
    return cfg.resolve(file_values, flags)


def _gateway(settings) -> LLMGateway:
    mode = Mode(settings["llm-mode"])
    cassette_path = settings["cassette-path"]
    cassette = None
    if mode is Mode.REPLAY:
        if not cassette_path:
            raise UsageError("--llm-mode replay needs --cassette")
        with stage("cassette"):
            cassette = Cassette.load(cassette_path)
    elif mode is Mode.RECORD:
        if not cassette_path:
            raise UsageError("--llm-mode record needs --cassette")
        with stage("cassette"):
            cassette = Cassette.load(cassette_path, missing_ok=True)
    provider = None if mode is Mode.REPLAY else OpenAICompatibleProvider(settings["provider-url"])
    return LLMGateway(
        mode=mode,
        cassette=cassette,
        provider=provider,
        model=settings["model"],
        embedding_model=settings["embedding-model"],
        temperature=settings["temperature"],
        seed=settings["seed"],
    )


def _scan_config(settings) -> ScanConfig:
    return ScanConfig(
        source_roots=settings["source-roots"],
        extensions=settings["extensions"],
        exclude_globs=settings["exclude-globs"],
        exclude_test_code=settings["exclude-test-code"],
    )


def _match_config(settings) -> MatchConfig:
    return MatchConfig(settings["jw-threshold"], settings["lev-threshold"], settings["cos-threshold"])


class Output:
    """Writes named artifacts to ``--out`` or, without it, to stdout."""

    def __init__(self, directory, stdout):
        self.directory = Path(directory) if directory else None
        self.stdout = stdout
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    def emit(self, name: str, text: str) -> None:
        if self.directory is None:
            self.stdout.write(text)
        else:
            (self.directory / name).write_text(text, encoding="utf-8")


def _sam_csv(sam) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "name"])
    writer.writerows((c.id, c.name) for c in sam.components)
    return buf.getvalue()


def _read_scores(path) -> dict[str, float]:
    scores = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) != 2:
            raise ValueError(f"{path}: expected a two-column CSV with a header")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{reader.line_num}: expected 2 columns")
            scores[row[0].strip()] = float(row[1])
    return scores


# -- commands --------------------------------------------------------------------


def cmd_scan(args, settings, out):
    with stage("scan"):
        model = scan_source_tree(args.root, _scan_config(settings))
    summary = {"root": args.root, "files": len(model.files), "packages": list(model.packages)}
    out.emit("scan.json", json.dumps(summary, indent=2) + "\n")
    if out.directory is not None:
        out.emit("features.txt", render_feature_text(model.packages) + "\n")


def _extract_sam(settings, gateway, sad_path, root, project):
    mode = settings["mode"]
    if mode in ("doc", "both") and not sad_path:
        raise UsageError(f"mode {mode} needs --sad")
    if mode in ("code", "both") and not root:
        raise UsageError(f"mode {mode} needs --root")
    with stage("load-sad"):
        sad = load_sad(sad_path, project) if sad_path else None
    code = None
    if mode != "doc":
        with stage("scan"):
            code = scan_source_tree(root, _scan_config(settings))
    item = {"doc": sad, "code": code, "both": (sad, code)}[mode]
    extractor = ComponentExtractor(gateway, mode, settings["aggregation"], settings["threshold"],
                                   settings["casing"], project or (sad.project if sad else Path(root).name))
    with stage("extract-sam"):
        return extractor.fit().transform([item])[0]


def cmd_extract_sam(args, settings, out):
    sam = _extract_sam(settings, _gateway(settings), args.sad, args.root, args.project)
    out.emit("sam.csv", _sam_csv(sam))


def cmd_artemis(args, settings, out):
    gateway = _gateway(settings)
    with stage("load-inputs"):
        sad = load_sad(args.sad)
        sam = load_component_list(args.sam)
    with stage("artemis"):
        links = run_artemis(sad, sam, gateway, _match_config(settings), entities_out=args.entities_out)
    out.emit("sad_sam.csv", links_to_csv(links))


def cmd_codelink(args, settings, out):
    with stage("load-inputs"):
        sam = load_component_list(args.sam)
    with stage("scan"):
        code = scan_source_tree(args.root, _scan_config(settings))
    with stage("codelink"):
        links = link_sam_to_code(sam, code, settings["link-threshold"], settings["dominance-band"])
    out.emit("sam_code.csv", links_to_csv(links))


def cmd_trace(args, settings, out):
    if out.directory is None:
        out = Output("archtrace-out", out.stdout)
    gateway = _gateway(settings)
    with stage("load-inputs"):
        sad = load_sad(args.sad, args.project)
        sam = load_component_list(args.sam, sad.project) if args.sam else None
    with stage("scan"):
        code = scan_source_tree(args.root, _scan_config(settings))
    recovery = TraceLinkRecovery(
        gateway, settings["mode"], settings["aggregation"], settings["threshold"], settings["casing"],
        settings["jw-threshold"], settings["lev-threshold"], settings["cos-threshold"],
        settings["link-threshold"], settings["dominance-band"],
    ).fit(code, sam)
    with stage("trace"):
        result = recovery.trace(sad)
    out.emit("sam.csv", _sam_csv(result.sam))
    out.emit("sad_sam.csv", links_to_csv(result.sad_sam))
    out.emit("sam_code.csv", links_to_csv(result.sam_code))
    out.emit("sad_code.csv", links_to_csv(result.sad_code))

    golds = [
        ("sad_code", args.gold, LinkKind.SAD_CODE, result.sad_code),
        ("sad_sam", args.gold_sad_sam, LinkKind.SAD_SAM, result.sad_sam),
        ("sam_code", args.gold_sam_code, LinkKind.SAM_CODE, result.sam_code),
    ]
    for name, path, kind, found in golds:
        if not path:
            continue
        if sam is None and kind is not LinkKind.SAD_CODE:
            logger.warning("%s gold is compared against generated component ids (x-0, x-1, ...)", name)
        with stage("eval"):
            report = build_report([evaluate(sad.project, found, load_gold_links(path, kind))])
        out.emit(f"report_{name}.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
        out.emit(f"report_{name}.txt", render_text(report))


def cmd_eval(args, settings, out):
    if len(args.found) != len(args.gold):
        raise UsageError("--found and --gold must be given the same number of times")
    projects = args.project or [Path(f).stem for f in args.found]
    if len(projects) != len(args.found):
        raise UsageError("give one --project per --found")
    results = []
    with stage("eval"):
        for project, found_path, gold_path in zip(projects, args.found, args.gold):
            found = load_links(found_path, args.kind)
            gold = load_gold_links(gold_path, args.kind)
            results.append(evaluate(project, found, gold))
        report = build_report(results)
    _emit_report(report, out)


def cmd_significance(args, settings, out):
    with stage("significance"):
        ours, baseline = _read_scores(args.ours), _read_scores(args.baseline)
        shared = [p for p in ours if p in baseline]
        if not shared:
            raise ValueError("the two score files share no project")
        name = args.name or f"{Path(args.ours).stem} > {Path(args.baseline).stem}"
        comparison = Comparison.from_scores(name, [ours[p] for p in shared], [baseline[p] for p in shared])
        report = build_report([], [comparison])
    _emit_report(report, out)


def _emit_report(report, out):
    text = render_text(report)
    if out.directory is None:
        out.emit("report.txt", text)
    else:
        write_report(report, out.directory / "report.json", out.directory / "report.txt")
        out.stdout.write(text)


COMMANDS = {
    "scan": cmd_scan,
    "extract-sam": cmd_extract_sam,
    "artemis": cmd_artemis,
    "codelink": cmd_codelink,
    "trace": cmd_trace,
    "eval": cmd_eval,
    "significance": cmd_significance,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with stage("config"):
            settings = _settings(args)
        COMMANDS[args.command](args, settings, Output(args.out, stdout))
    except UsageError as exc:
        stderr.write(f"archtrace: usage error: {exc}\n")
        return 2
    except PipelineError as exc:
        stderr.write(f"archtrace: error in stage {exc}\n")
        return 1
    except ArchTraceError as exc:
        stderr.write(f"archtrace: error: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
