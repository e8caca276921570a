"""Observed-agreement scoring between two annotators of one document.

Four variants cross {identical span, partial overlap} x {fine type, coarse
group} matching:

* strict    - identical span, type sets intersect
* lenient   - strict, plus overlapping spans as half matches
* flexible  - identical span, group sets intersect
* relaxed   - flexible, plus overlapping spans as half matches

A full pair counts as one match; a half pair counts as half a match and
half a non-match; every unpaired annotation is one non-match. The score is
matches / (matches + non_matches).

Pairing rule: among all ways to pair annotations (full pairs on identical
spans, half pairs on overlapping spans, each annotation used at most once,
pairs only where the variant's type predicate holds), the engine picks the
pairing that maximizes the score. Ties prefer more full pairs, and the
specific pairs are then the lexicographically smallest by span/type/id
order, computed from the side with the smaller annotator id so the result
is invariant under swapping the two annotators. This makes the score
deterministic, symmetric, and monotone when the predicate weakens or half
matches are admitted (strict <= lenient <= relaxed and
strict <= flexible <= relaxed on every input).
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Optional, Sequence

from .model import Annotation, Relation
from .registry import Registry

VARIANTS = ("strict", "lenient", "flexible", "relaxed")
_GROUP_VARIANTS = frozenset({"flexible", "relaxed"})
_HALF_VARIANTS = frozenset({"lenient", "relaxed"})

GOLD_THRESHOLD = 0.67


class AgreementError(Exception):
    """Raised on invalid inputs to the agreement operations."""


class SegmentLabel(str, enum.Enum):
    GOLD = "gold"
    PLATINUM = "platinum"


@dataclass(frozen=True)
class PairingResult:
    """Outcome of pairing two annotation sets under one variant."""

    variant: str
    full_pairs: list[tuple[Annotation, Annotation]]
    half_pairs: list[tuple[Annotation, Annotation]]
    unpaired: list[Annotation]

    @property
    def matches(self) -> float:
        return len(self.full_pairs) + 0.5 * len(self.half_pairs)

    @property
    def non_matches(self) -> float:
        return len(self.unpaired) + 0.5 * len(self.half_pairs)


def pair_annotations(
    set_a: Sequence[Annotation],
    set_b: Sequence[Annotation],
    variant: str,
    registry: Registry,
) -> PairingResult:
    """Pair two annotators' annotations under the given variant."""
    _check_variant(variant)
    _check_sides(set_a, set_b)
    a_sorted = sorted(set_a, key=Annotation.sort_key)
    b_sorted = sorted(set_b, key=Annotation.sort_key)

    swapped = _swap_sides(a_sorted, b_sorted)
    left, right = (b_sorted, a_sorted) if swapped else (a_sorted, b_sorted)

    edges = _build_edges(left, right, variant, registry)
    frontier = _frontier_for_edges(edges)
    total = len(left) + len(right)
    target = _select_target(frontier, total)
    chosen = _reconstruct(left, right, edges, target)

    fulls: list[tuple[Annotation, Annotation]] = []
    halves: list[tuple[Annotation, Annotation]] = []
    used: set[tuple[str, str]] = set()
    for li, ri, is_full in chosen:
        pair = (right[ri], left[li]) if swapped else (left[li], right[ri])
        (fulls if is_full else halves).append(pair)
        used.add((left[li].annotator_id, left[li].id))
        used.add((right[ri].annotator_id, right[ri].id))
    fulls.sort(key=lambda p: (p[0].sort_key(), p[1].sort_key()))
    halves.sort(key=lambda p: (p[0].sort_key(), p[1].sort_key()))
    unpaired = [x for x in a_sorted + b_sorted if (x.annotator_id, x.id) not in used]
    unpaired.sort(key=Annotation.sort_key)
    return PairingResult(variant, fulls, halves, unpaired)


def iaa(pairing: PairingResult) -> Optional[float]:
    """Observed agreement for a pairing; None when there was nothing to pair."""
    full = len(pairing.full_pairs)
    half = len(pairing.half_pairs)
    unpaired = len(pairing.unpaired)
    if full + half + unpaired == 0:
        return None
    return (full + 0.5 * half) / (full + half + unpaired)


def agreement_value(
    set_a: Sequence[Annotation],
    set_b: Sequence[Annotation],
    variant: str,
    registry: Registry,
) -> Optional[float]:
    """Score without reconstructing the concrete pairs (faster for sweeps)."""
    _check_variant(variant)
    _check_sides(set_a, set_b)
    total = len(set_a) + len(set_b)
    if total == 0:
        return None
    a_sorted = sorted(set_a, key=Annotation.sort_key)
    b_sorted = sorted(set_b, key=Annotation.sort_key)
    edges = _build_edges(a_sorted, b_sorted, variant, registry)
    frontier = _frontier_for_edges(edges)
    full, half = _select_target(frontier, total)
    return (full + 0.5 * half) / (total - full - half)


def all_variant_values(
    set_a: Sequence[Annotation],
    set_b: Sequence[Annotation],
    registry: Registry,
) -> dict[str, Optional[float]]:
    return {v: agreement_value(set_a, set_b, v, registry) for v in VARIANTS}


def relation_iaa(
    rels_a: Sequence[Relation],
    rels_b: Sequence[Relation],
    strict_pairing: PairingResult,
    rtype: Optional[str] = None,
) -> Optional[float]:
    """Agreement over relations whose endpoints both annotators labelled.

    A relation is eligible only when both of its endpoint annotations sit in
    strict full pairs; eligible relations match when their paired endpoints
    correspond and the relation type is equal. Everything else is excluded
    entirely rather than counted against the score.
    """
    a_pair: dict[str, int] = {}
    b_pair: dict[str, int] = {}
    for idx, (a, b) in enumerate(strict_pairing.full_pairs):
        a_pair[a.id] = idx
        b_pair[b.id] = idx

    def eligible_keys(rels: Sequence[Relation], mapping: dict[str, int]) -> Counter:
        keys: Counter = Counter()
        for r in rels:
            if rtype is not None and r.rtype.value != rtype:
                continue
            if r.source_id in mapping and r.target_id in mapping:
                keys[(mapping[r.source_id], mapping[r.target_id], r.rtype.value)] += 1
        return keys

    ca = eligible_keys(rels_a, a_pair)
    cb = eligible_keys(rels_b, b_pair)
    matches = sum(min(ca[k], cb[k]) for k in ca.keys() & cb.keys())
    total = sum(ca.values()) + sum(cb.values())
    non_matches = total - 2 * matches
    if matches + non_matches == 0:
        return None
    return matches / (matches + non_matches)


def per_type_iaa(
    set_a: Sequence[Annotation],
    set_b: Sequence[Annotation],
    sty: str,
    registry: Registry,
) -> Optional[float]:
    """Strict agreement restricted to annotations carrying one semantic type."""
    code = registry.resolve(sty).code
    sub_a = [a for a in set_a if code in a.types]
    sub_b = [b for b in set_b if code in b.types]
    pairing = pair_annotations(sub_a, sub_b, "strict", registry)
    return iaa(pairing)


def strength_label(value: float) -> str:
    """Agreement-strength band for a score in [0, 1]."""
    if not 0.0 <= value <= 1.0:
        raise AgreementError(f"agreement value out of range: {value}")
    if value >= 0.81:
        return "almost perfect"
    if value >= 0.61:
        return "substantial"
    if value >= 0.41:
        return "moderate"
    return "below moderate"


def reliability_flag(value: float) -> str:
    """Coarser reliability reading: good / tolerable / low."""
    if not 0.0 <= value <= 1.0:
        raise AgreementError(f"agreement value out of range: {value}")
    if value >= 0.8:
        return "good"
    if value > GOLD_THRESHOLD:
        return "tolerable"
    return "low"


def segment(doc_iaa: Optional[float], threshold: float = GOLD_THRESHOLD) -> SegmentLabel:
    """Gold/platinum split: gold needs agreement strictly above the threshold."""
    if doc_iaa is None:
        raise AgreementError("cannot segment unannotated document")
    if not 0.0 <= doc_iaa <= 1.0:
        raise AgreementError(f"agreement value out of range: {doc_iaa}")
    return SegmentLabel.GOLD if doc_iaa > threshold else SegmentLabel.PLATINUM


@dataclass
class DocumentAgreement:
    """Per-document agreement report across all variants."""

    doc_id: str
    values: dict[str, Optional[float]]
    counts: dict[str, tuple[float, float]]
    relations: Optional[float] = None
    per_type: dict[str, Optional[float]] = field(default_factory=dict)
    per_rtype: dict[str, Optional[float]] = field(default_factory=dict)

    @property
    def labels(self) -> dict[str, Optional[str]]:
        return {
            v: strength_label(x) if x is not None else None
            for v, x in self.values.items()
        }


def compute_document_agreement(
    doc_id: str,
    set_a: Sequence[Annotation],
    set_b: Sequence[Annotation],
    rels_a: Sequence[Relation],
    rels_b: Sequence[Relation],
    registry: Registry,
    *,
    per_type: bool = False,
) -> DocumentAgreement:
    """Full agreement report for one double-annotated document."""
    values: dict[str, Optional[float]] = {}
    counts: dict[str, tuple[float, float]] = {}
    strict_pairing: Optional[PairingResult] = None
    for variant in VARIANTS:
        pairing = pair_annotations(set_a, set_b, variant, registry)
        if variant == "strict":
            strict_pairing = pairing
        values[variant] = iaa(pairing)
        counts[variant] = (pairing.matches, pairing.non_matches)
    assert strict_pairing is not None
    report = DocumentAgreement(doc_id=doc_id, values=values, counts=counts)
    report.relations = relation_iaa(rels_a, rels_b, strict_pairing)
    report.per_rtype = {
        rt: relation_iaa(rels_a, rels_b, strict_pairing, rtype=rt)
        for rt in ("associated_with", "negation_of")
    }
    if per_type:
        codes = sorted({c for ann in (*set_a, *set_b) for c in ann.types})
        report.per_type = {
            code: per_type_iaa(set_a, set_b, code, registry) for code in codes
        }
    return report


@dataclass
class CorpusAgreement:
    """Macro and pooled (micro) agreement across many documents."""

    documents: int
    macro: dict[str, Optional[float]]
    micro: dict[str, Optional[float]]


def aggregate(reports: Sequence[DocumentAgreement]) -> CorpusAgreement:
    """Aggregate per-document reports; macro averages defined values, micro pools counts."""
    if not any(v is not None for r in reports for v in r.values.values()):
        raise AgreementError("no document has a defined agreement value")
    macro: dict[str, Optional[float]] = {}
    micro: dict[str, Optional[float]] = {}
    for variant in VARIANTS:
        defined = [r.values[variant] for r in reports if r.values[variant] is not None]
        macro[variant] = fmean(defined) if defined else None
        pooled_m = sum(r.counts[variant][0] for r in reports)
        pooled_n = sum(r.counts[variant][1] for r in reports)
        micro[variant] = (
            pooled_m / (pooled_m + pooled_n) if pooled_m + pooled_n > 0 else None
        )
    return CorpusAgreement(documents=len(reports), macro=macro, micro=micro)


# ---------------------------------------------------------------------------
# Pairing internals


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise AgreementError(f"unknown agreement variant: {variant!r}")


def _check_sides(set_a: Sequence[Annotation], set_b: Sequence[Annotation]) -> None:
    docs = {x.doc_id for x in set_a} | {x.doc_id for x in set_b}
    if len(docs) > 1:
        raise AgreementError(f"annotation sets span multiple documents: {sorted(docs)}")
    ann_a = {x.annotator_id for x in set_a}
    ann_b = {x.annotator_id for x in set_b}
    if len(ann_a) > 1 or len(ann_b) > 1:
        raise AgreementError("each side must come from a single annotator")
    if ann_a and ann_b and ann_a == ann_b:
        raise AgreementError("both sides belong to the same annotator")


def _swap_sides(a: Sequence[Annotation], b: Sequence[Annotation]) -> bool:
    if not a or not b:
        return False
    return b[0].annotator_id < a[0].annotator_id


def _predicate_sets(
    anns: Sequence[Annotation], variant: str, registry: Registry
) -> list[frozenset[str]]:
    if variant in _GROUP_VARIANTS:
        return [
            frozenset(registry.resolve(c).group.code for c in ann.types)
            for ann in anns
        ]
    return [ann.types for ann in anns]


def _build_edges(
    left: Sequence[Annotation],
    right: Sequence[Annotation],
    variant: str,
    registry: Registry,
) -> list[tuple[int, int, bool]]:
    halves = variant in _HALF_VARIANTS
    pl = _predicate_sets(left, variant, registry)
    pr = _predicate_sets(right, variant, registry)
    edges: list[tuple[int, int, bool]] = []
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            if not pl[i] & pr[j]:
                continue
            if a.span == b.span:
                edges.append((i, j, True))
            elif halves and a.span.overlaps(b.span):
                edges.append((i, j, False))
    return edges


def _pareto(points: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    best_h: dict[int, int] = {}
    for f, h in points:
        if best_h.get(f, -1) < h:
            best_h[f] = h
    frontier: list[tuple[int, int]] = []
    max_h = -1
    for f in sorted(best_h, reverse=True):
        if best_h[f] > max_h:
            frontier.append((f, best_h[f]))
            max_h = best_h[f]
    return tuple(sorted(frontier))


def _component_frontier(
    nx: int, ny: int, adj: list[list[tuple[int, bool]]]
) -> tuple[tuple[int, int], ...]:
    """Achievable (full, half) counts within one connected component.

    Exponential in the smaller side of the component, which stays tiny for
    real documents because only overlapping spans connect annotations.
    """
    memo: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {}

    def rec(i: int, used: int) -> tuple[tuple[int, int], ...]:
        if i == nx:
            return ((0, 0),)
        key = (i, used)
        cached = memo.get(key)
        if cached is not None:
            return cached
        points = set(rec(i + 1, used))
        for y, is_full in adj[i]:
            bit = 1 << y
            if used & bit:
                continue
            for f, h in rec(i + 1, used | bit):
                points.add((f + 1, h) if is_full else (f, h + 1))
        result = _pareto(points)
        memo[key] = result
        return result

    return rec(0, 0)


def _frontier_for_edges(
    edges: Sequence[tuple[int, int, bool]]
) -> tuple[tuple[int, int], ...]:
    """Achievable (full, half) counts over the whole edge set."""
    if not edges:
        return ((0, 0),)

    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    for i, j, _ in edges:
        for node in ((0, i), (1, j)):
            parent.setdefault(node, node)
        union((0, i), (1, j))

    by_root: dict[tuple[int, int], list[tuple[int, int, bool]]] = {}
    for e in edges:
        by_root.setdefault(find((0, e[0])), []).append(e)

    combined: tuple[tuple[int, int], ...] = ((0, 0),)
    for root in sorted(by_root):
        comp = by_root[root]
        lefts = sorted({i for i, _, _ in comp})
        rights = sorted({j for _, j, _ in comp})
        # Recurse over the larger side so the bitmask covers the smaller one.
        flip = len(rights) > len(lefts)
        xs, ys = (rights, lefts) if flip else (lefts, rights)
        x_index = {v: k for k, v in enumerate(xs)}
        y_index = {v: k for k, v in enumerate(ys)}
        adj: list[list[tuple[int, bool]]] = [[] for _ in xs]
        for i, j, is_full in comp:
            x, y = (j, i) if flip else (i, j)
            adj[x_index[x]].append((y_index[y], is_full))
        if _is_complete_full(adj, len(ys)):
            frontier: tuple[tuple[int, int], ...] = ((min(len(xs), len(ys)), 0),)
        else:
            frontier = _component_frontier(len(xs), len(ys), adj)
        merged = {
            (f1 + f2, h1 + h2)
            for f1, h1 in combined
            for f2, h2 in frontier
        }
        combined = _pareto(merged)
    return combined


def _is_complete_full(adj: list[list[tuple[int, bool]]], ny: int) -> bool:
    return all(
        len(row) == ny and all(is_full for _, is_full in row) for row in adj
    )


def _select_target(
    frontier: Sequence[tuple[int, int]], total: int
) -> tuple[int, int]:
    """Pick the (full, half) counts maximizing the score; ties favour fulls.

    Comparison uses exact integer cross-multiplication of
    (2F + H) / (2 * (total - F - H)).
    """
    best = (0, 0)
    for f, h in frontier:
        bf, bh = best
        lhs = (2 * f + h) * (total - bf - bh)
        rhs = (2 * bf + bh) * (total - f - h)
        if lhs > rhs or (lhs == rhs and f > bf):
            best = (f, h)
    return best


def _reconstruct(
    left: Sequence[Annotation],
    right: Sequence[Annotation],
    edges: Sequence[tuple[int, int, bool]],
    target: tuple[int, int],
) -> list[tuple[int, int, bool]]:
    """Commit pairs in canonical order while the target stays reachable."""
    need_f, need_h = target
    if need_f == 0 and need_h == 0:
        return []
    order = sorted(
        range(len(edges)),
        key=lambda e: (left[edges[e][0]].sort_key(), right[edges[e][1]].sort_key()),
    )
    used_l: set[int] = set()
    used_r: set[int] = set()
    chosen: list[tuple[int, int, bool]] = []
    for ei in order:
        li, ri, is_full = edges[ei]
        if li in used_l or ri in used_r:
            continue
        if is_full and need_f == 0:
            continue
        if not is_full and need_h == 0:
            continue
        rest = [
            e
            for e in edges
            if e[0] not in used_l
            and e[0] != li
            and e[1] not in used_r
            and e[1] != ri
        ]
        nf = need_f - (1 if is_full else 0)
        nh = need_h - (0 if is_full else 1)
        if any(f >= nf and h >= nh for f, h in _frontier_for_edges(rest)):
            chosen.append((li, ri, is_full))
            used_l.add(li)
            used_r.add(ri)
            need_f, need_h = nf, nh
            if need_f == 0 and need_h == 0:
                break
    if need_f or need_h:
        raise AgreementError("internal error: pairing target not reached")
    return chosen
