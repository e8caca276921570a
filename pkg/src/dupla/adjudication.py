"""Divergence computation and gold-standard adjudication.

The adjudicator resolves only what the two annotators disagree on: pairs
both produced are locked into the gold set, and the adjudicator can neither
drop them nor invent annotations that neither annotator made.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .agreement import (
    DocumentAgreement,
    GOLD_THRESHOLD,
    SegmentLabel,
    pair_annotations,
    segment,
)
from .model import Actor, Annotation, Document, DocumentStatus, Relation, Role
from .registry import Registry

GOLD_ANNOTATOR = "gold"


class AdjudicationError(Exception):
    """Raised when an adjudication request violates the workflow rules."""


@dataclass
class DivergenceSet:
    """Partition of both annotators' work into agreed and disputed parts."""

    doc_id: str
    annotator_a: str
    annotator_b: str
    locked: list[Annotation]
    candidates_a: list[Annotation]
    candidates_b: list[Annotation]
    locked_relations: list[Relation]
    candidate_relations_a: list[Relation]
    candidate_relations_b: list[Relation]
    # Original annotation id -> merged locked annotation id, per side.
    locked_map_a: dict[str, str] = field(default_factory=dict)
    locked_map_b: dict[str, str] = field(default_factory=dict)

    def candidate_ids(self) -> set[str]:
        return (
            {a.id for a in self.candidates_a}
            | {b.id for b in self.candidates_b}
            | {r.id for r in self.candidate_relations_a}
            | {r.id for r in self.candidate_relations_b}
        )

    def locked_ids(self) -> set[str]:
        ids = {a.id for a in self.locked} | {r.id for r in self.locked_relations}
        ids |= set(self.locked_map_a) | set(self.locked_map_b)
        return ids


@dataclass(frozen=True)
class AdjudicationDecision:
    adjudicator: Actor
    kept: frozenset[str] = frozenset()
    dropped: frozenset[str] = frozenset()
    note: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kept", frozenset(self.kept))
        object.__setattr__(self, "dropped", frozenset(self.dropped))


@dataclass
class GoldDocument:
    """Adjudicated annotation set with its agreement scores and segment."""

    document: Document
    annotations: list[Annotation]
    relations: list[Relation]
    provenance: dict[str, str]
    segment: SegmentLabel
    iaa_values: dict[str, Optional[float]]


def _dedupe(annotations: Sequence[Annotation]) -> list[Annotation]:
    """Collapse identical (span, types) duplicates within one annotator."""
    out: list[Annotation] = []
    seen: set[tuple] = set()
    for ann in sorted(annotations, key=Annotation.sort_key):
        key = (ann.span.start, ann.span.end, ann.types)
        if key in seen:
            continue
        seen.add(key)
        out.append(ann)
    return out


def _dedupe_relations(relations: Sequence[Relation]) -> list[Relation]:
    out: list[Relation] = []
    seen: set[tuple] = set()
    for rel in sorted(relations, key=lambda r: (r.source_id, r.target_id, r.rtype.value, r.id)):
        key = (rel.source_id, rel.target_id, rel.rtype)
        if key in seen:
            continue
        seen.add(key)
        out.append(rel)
    return out


def compute_divergence(
    document: Document,
    set_a: Sequence[Annotation],
    set_b: Sequence[Annotation],
    rels_a: Sequence[Relation],
    rels_b: Sequence[Relation],
    registry: Registry,
) -> DivergenceSet:
    """Split both submissions into locked agreements and per-side candidates."""
    if document.status not in (DocumentStatus.ANNOTATED, DocumentStatus.ADJUDICATED):
        raise AdjudicationError("awaiting second annotation")
    ded_a = _dedupe(set_a)
    ded_b = _dedupe(set_b)
    annotator_a = ded_a[0].annotator_id if ded_a else "annotator-a"
    annotator_b = ded_b[0].annotator_id if ded_b else "annotator-b"

    pairing = pair_annotations(ded_a, ded_b, "strict", registry)

    locked: list[Annotation] = []
    locked_map_a: dict[str, str] = {}
    locked_map_b: dict[str, str] = {}
    for index, (a, b) in enumerate(pairing.full_pairs, start=1):
        merged_id = f"g{index}"
        locked.append(
            Annotation(
                id=merged_id,
                doc_id=document.id,
                annotator_id=GOLD_ANNOTATOR,
                span=a.span,
                types=a.types | b.types,
                expansion=a.expansion or b.expansion,
                created_round=a.created_round,
            )
        )
        locked_map_a[a.id] = merged_id
        locked_map_b[b.id] = merged_id

    candidates_a = [x for x in pairing.unpaired if x.annotator_id == annotator_a]
    candidates_b = [x for x in pairing.unpaired if x.annotator_id == annotator_b]

    ded_rels_a = _dedupe_relations(rels_a)
    ded_rels_b = _dedupe_relations(rels_b)
    keys_a = {
        (locked_map_a[r.source_id], locked_map_a[r.target_id], r.rtype): r
        for r in ded_rels_a
        if r.source_id in locked_map_a and r.target_id in locked_map_a
    }
    keys_b = {
        (locked_map_b[r.source_id], locked_map_b[r.target_id], r.rtype): r
        for r in ded_rels_b
        if r.source_id in locked_map_b and r.target_id in locked_map_b
    }
    locked_relations = [
        Relation(
            id=f"gr{i}",
            doc_id=document.id,
            annotator_id=GOLD_ANNOTATOR,
            source_id=source,
            target_id=target,
            rtype=rtype,
        )
        for i, (source, target, rtype) in enumerate(sorted(keys_a.keys() & keys_b.keys(), key=lambda k: (k[0], k[1], k[2].value)), start=1)
    ]
    agreed_a = {r.id for key, r in keys_a.items() if key in keys_b}
    agreed_b = {r.id for key, r in keys_b.items() if key in keys_a}
    candidate_relations_a = [r for r in ded_rels_a if r.id not in agreed_a]
    candidate_relations_b = [r for r in ded_rels_b if r.id not in agreed_b]

    return DivergenceSet(
        doc_id=document.id,
        annotator_a=annotator_a,
        annotator_b=annotator_b,
        locked=locked,
        candidates_a=candidates_a,
        candidates_b=candidates_b,
        locked_relations=locked_relations,
        candidate_relations_a=candidate_relations_a,
        candidate_relations_b=candidate_relations_b,
        locked_map_a=locked_map_a,
        locked_map_b=locked_map_b,
    )


def adjudicate(
    document: Document,
    divergence: DivergenceSet,
    decision: AdjudicationDecision,
    agreement_report: DocumentAgreement,
    *,
    assigned_adjudicator: Optional[str] = None,
    variant: str = "strict",
    threshold: float = GOLD_THRESHOLD,
) -> GoldDocument:
    """Apply an adjudication decision and produce the gold document.

    Gold = locked + explicitly kept candidates. Relations are kept only when
    both endpoints survive. Deterministic: running the same decision twice
    yields an identical gold document.
    """
    adjudicator = decision.adjudicator
    if adjudicator.role is not Role.ADJUDICATOR:
        raise AdjudicationError(f"actor {adjudicator.id} is not an adjudicator")
    if assigned_adjudicator is not None and adjudicator.id != assigned_adjudicator:
        raise AdjudicationError(
            f"actor {adjudicator.id} is not the adjudicator assigned to {document.id}"
        )

    locked_ids = divergence.locked_ids()
    candidate_ids = divergence.candidate_ids()
    for dropped in sorted(decision.dropped):
        if dropped in locked_ids:
            raise AdjudicationError("adjudicator cannot remove agreed annotations")
        if dropped not in candidate_ids:
            raise AdjudicationError(f"unknown id in drop list: {dropped}")
    for kept in sorted(decision.kept):
        if kept in locked_ids:
            raise AdjudicationError("agreed annotations are kept automatically")
        if kept not in candidate_ids:
            raise AdjudicationError("adjudicator cannot create annotations")
    overlap = decision.kept & decision.dropped
    if overlap:
        raise AdjudicationError(f"ids both kept and dropped: {sorted(overlap)}")

    provenance = {ann.id: "both" for ann in divergence.locked}
    gold_annotations = list(divergence.locked)
    for ann in divergence.candidates_a:
        if ann.id in decision.kept:
            gold_annotations.append(ann)
            provenance[ann.id] = "a_only"
    for ann in divergence.candidates_b:
        if ann.id in decision.kept:
            gold_annotations.append(ann)
            provenance[ann.id] = "b_only"
    gold_annotations.sort(key=Annotation.sort_key)
    gold_ids = {ann.id for ann in gold_annotations}

    gold_relations = list(divergence.locked_relations)
    for rel, mapping, origin in [
        *((r, divergence.locked_map_a, "a_only") for r in divergence.candidate_relations_a),
        *((r, divergence.locked_map_b, "b_only") for r in divergence.candidate_relations_b),
    ]:
        if rel.id not in decision.kept:
            continue
        source = mapping.get(rel.source_id, rel.source_id)
        target = mapping.get(rel.target_id, rel.target_id)
        if source not in gold_ids or target not in gold_ids:
            continue  # endpoints did not survive adjudication
        gold_relations.append(
            Relation(
                id=rel.id,
                doc_id=document.id,
                annotator_id=rel.annotator_id,
                source_id=source,
                target_id=target,
                rtype=rel.rtype,
            )
        )
        provenance[rel.id] = origin
    for rel in divergence.locked_relations:
        provenance[rel.id] = "both"
    gold_relations.sort(key=lambda r: (r.source_id, r.target_id, r.rtype.value, r.id))

    value = agreement_report.values.get(variant)
    label = segment(value, threshold)
    document.advance_status(DocumentStatus.ADJUDICATED)
    iaa_values = {**agreement_report.values, "relations": agreement_report.relations}
    return GoldDocument(
        document=document,
        annotations=gold_annotations,
        relations=gold_relations,
        provenance=provenance,
        segment=label,
        iaa_values=iaa_values,
    )
