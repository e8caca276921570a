# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled edit-distance kernel. Mirrors ``dupla._kernels.pure`` exactly."""

from libc.stdlib cimport free, malloc


cpdef int bounded_levenshtein(str a, str b, int k):
    """Levenshtein distance capped at ``k``; returns k + 1 when exceeded."""
    if k < 0:
        raise ValueError("bound must be >= 0")
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    if la > lb:
        a, b = b, a
        la, lb = lb, la
    if lb - la > k:
        return k + 1
    cdef int *prev = <int *> malloc((lb + 1) * sizeof(int))
    cdef int *cur = <int *> malloc((lb + 1) * sizeof(int))
    cdef int *swap
    if prev == NULL or cur == NULL:
        if prev != NULL:
            free(prev)
        if cur != NULL:
            free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef int cost, v, w, best, d
    cdef Py_UCS4 ca
    try:
        for j in range(lb + 1):
            prev[j] = <int> j
        for i in range(1, la + 1):
            ca = a[i - 1]
            cur[0] = <int> i
            best = cur[0]
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
            swap = prev
            prev = cur
            cur = swap
        d = prev[lb]
        return d if d <= k else k + 1
    finally:
        free(prev)
        free(cur)


def scan(str query, list terms, Py_ssize_t short_len, int short_bound, int long_bound):
    """Match ``query`` against every term, with a length-graded bound."""
    cdef list out = []
    cdef Py_ssize_t i, n = len(terms)
    cdef str term
    cdef int bound, d
    for i in range(n):
        term = <str> terms[i]
        bound = short_bound if len(term) <= short_len else long_bound
        d = bounded_levenshtein(query, term, bound)
        if d <= bound:
            out.append((i, d))
    return out
