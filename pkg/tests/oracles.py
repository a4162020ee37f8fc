"""Independent reference implementations used to check the library code."""

from __future__ import annotations

import itertools
import sys
from fractions import Fraction
from functools import lru_cache


def levenshtein_oracle(a: str, b: str) -> int:
    """Textbook recursive edit distance, memoized."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def normalized_levenshtein_oracle(a: str, b: str) -> float:
    a, b = a.lower(), b.lower()
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein_oracle(a, b) / max(len(a), len(b))


def wilcoxon_enumeration_oracle(differences) -> Fraction:
    """Exact one-sided p-value by listing every sign assignment of the ranks."""
    magnitudes = sorted(abs(d) for d in differences)
    rank = {m: i + 1 for i, m in enumerate(magnitudes)}
    observed = sum(rank[abs(d)] for d in differences if d > 0)
    n = len(differences)
    hits = sum(
        1
        for signs in itertools.product((0, 1), repeat=n)
        if sum(r * s for r, s in zip(range(1, n + 1), signs)) >= observed
    )
    return Fraction(hits, 2 ** n)


def join_oracle(sad_sam_pairs, sam_code_pairs) -> set:
    """Nested-loop join over all link pairs."""
    result = set()
    for s, c1 in sad_sam_pairs:
        for c2, f in sam_code_pairs:
            if c1 == c2:
                result.add((s, f))
    return result
