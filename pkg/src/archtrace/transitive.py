"""Composition of documentation-to-model and model-to-code links."""

from collections import defaultdict

from .errors import KindMismatchError
from .model import LinkKind, LinkSet, TraceLink


def compose_links(sad_sam: LinkSet, sam_code: LinkSet) -> LinkSet:
    """Relational join on the shared component: (s, c) and (c, f) give (s, f)."""
    if sad_sam.kind is not LinkKind.SAD_SAM:
        raise KindMismatchError(f"left operand must be sad-sam links, got {sad_sam.kind.value}")
    if sam_code.kind is not LinkKind.SAM_CODE:
        raise KindMismatchError(f"right operand must be sam-code links, got {sam_code.kind.value}")
    files_by_component = defaultdict(set)
    for link in sam_code.links:
        files_by_component[link.left].add(link.right)
    composed = frozenset(
        TraceLink(LinkKind.SAD_CODE, link.left, path)
        for link in sad_sam.links
        for path in files_by_component.get(link.right, ())
    )
    return LinkSet(LinkKind.SAD_CODE, composed)
