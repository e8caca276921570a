"""Pure-Python edit-distance kernel.

Reference implementation; the compiled module in ``_fast.pyx`` mirrors this
behaviour exactly and is preferred at import time when available.
"""

from __future__ import annotations


def bounded_levenshtein(a: str, b: str, k: int) -> int:
    """Levenshtein distance between ``a`` and ``b``, capped at ``k``.

    Returns the exact distance when it is <= k, and k + 1 otherwise.
    Distances are computed over code points with unit costs.
    """
    if k < 0:
        raise ValueError("bound must be >= 0")
    la, lb = len(a), len(b)
    if la > lb:
        a, b = b, a
        la, lb = lb, la
    if lb - la > k:
        return k + 1
    prev = list(range(lb + 1))
    cur = [0] * (lb + 1)
    for i in range(1, la + 1):
        ca = a[i - 1]
        cur[0] = i
        best = i
        for j in range(1, lb + 1):
            cost = 0 if ca == b[j - 1] else 1
            v = prev[j] + 1
            w = cur[j - 1] + 1
            if w < v:
                v = w
            w = prev[j - 1] + cost
            if w < v:
                v = w
            cur[j] = v
            if v < best:
                best = v
        if best > k:
            return k + 1
        prev, cur = cur, prev
    d = prev[lb]
    return d if d <= k else k + 1


def scan(
    query: str,
    terms: list[str],
    short_len: int,
    short_bound: int,
    long_bound: int,
) -> list[tuple[int, int]]:
    """Match ``query`` against every term, with a length-graded bound.

    Terms of length <= short_len tolerate short_bound edits, longer terms
    tolerate long_bound. Returns (index, distance) for every term within
    its bound, in input order.
    """
    out: list[tuple[int, int]] = []
    for i, term in enumerate(terms):
        bound = short_bound if len(term) <= short_len else long_bound
        d = bounded_levenshtein(query, term, bound)
        if d <= bound:
            out.append((i, d))
    return out
