"""Dict conversions for persisting and transporting model objects."""

from __future__ import annotations

from typing import Optional

from .adjudication import DivergenceSet, GoldDocument
from .agreement import SegmentLabel
from .model import (
    Actor,
    Annotation,
    Document,
    DocumentStatus,
    Relation,
    RelationType,
    Role,
    Span,
)
from .workflow import Assignment


def annotation_to_dict(ann: Annotation) -> dict:
    out = {
        "id": ann.id,
        "doc_id": ann.doc_id,
        "annotator": ann.annotator_id,
        "start": ann.span.start,
        "end": ann.span.end,
        "types": sorted(ann.types),
        "created_round": ann.created_round,
    }
    if ann.expansion is not None:
        out["expansion"] = ann.expansion
    return out


def annotation_from_dict(data: dict) -> Annotation:
    return Annotation(
        id=data["id"],
        doc_id=data["doc_id"],
        annotator_id=data["annotator"],
        span=Span(data["start"], data["end"]),
        types=frozenset(data["types"]),
        expansion=data.get("expansion"),
        created_round=data.get("created_round", 0),
    )


def relation_to_dict(rel: Relation) -> dict:
    return {
        "id": rel.id,
        "doc_id": rel.doc_id,
        "annotator": rel.annotator_id,
        "source": rel.source_id,
        "target": rel.target_id,
        "rtype": rel.rtype.value,
    }


def relation_from_dict(data: dict) -> Relation:
    return Relation(
        id=data["id"],
        doc_id=data["doc_id"],
        annotator_id=data["annotator"],
        source_id=data["source"],
        target_id=data["target"],
        rtype=RelationType(data["rtype"]),
    )


def document_to_dict(doc: Document) -> dict:
    return {
        "id": doc.id,
        "text": doc.text,
        "sections": [
            {"name": name, "start": body.start, "end": body.end}
            for name, body in doc.section_map
        ],
        "status": doc.status.value,
        "metadata": doc.metadata,
    }


def document_from_dict(data: dict) -> Document:
    return Document(
        id=data["id"],
        text=data["text"],
        section_map=[
            (s["name"], Span(s["start"], s["end"])) for s in data["sections"]
        ],
        status=DocumentStatus(data["status"]),
        metadata=data.get("metadata", {}),
    )


def actor_to_dict(actor: Actor) -> dict:
    return {
        "id": actor.id,
        "name": actor.name,
        "role": actor.role.value,
        "profile": actor.profile,
    }


def actor_from_dict(data: dict) -> Actor:
    return Actor(
        id=data["id"],
        name=data.get("name", data["id"]),
        role=Role(data["role"]),
        profile=data.get("profile", ""),
    )


def assignment_to_dict(assignment: Assignment) -> dict:
    return {
        "doc_id": assignment.doc_id,
        "annotator_a": assignment.annotator_a,
        "annotator_b": assignment.annotator_b,
        "adjudicator": assignment.adjudicator,
        "round": assignment.round,
    }


def assignment_from_dict(data: dict) -> Assignment:
    return Assignment(
        doc_id=data["doc_id"],
        annotator_a=data["annotator_a"],
        annotator_b=data["annotator_b"],
        adjudicator=data["adjudicator"],
        round=data["round"],
    )


def divergence_to_dict(div: DivergenceSet) -> dict:
    return {
        "doc_id": div.doc_id,
        "annotator_a": div.annotator_a,
        "annotator_b": div.annotator_b,
        "locked": [annotation_to_dict(a) for a in div.locked],
        "candidates_a": [annotation_to_dict(a) for a in div.candidates_a],
        "candidates_b": [annotation_to_dict(a) for a in div.candidates_b],
        "locked_relations": [relation_to_dict(r) for r in div.locked_relations],
        "candidate_relations_a": [relation_to_dict(r) for r in div.candidate_relations_a],
        "candidate_relations_b": [relation_to_dict(r) for r in div.candidate_relations_b],
        "locked_map_a": div.locked_map_a,
        "locked_map_b": div.locked_map_b,
    }


def gold_to_dict(gold: GoldDocument) -> dict:
    return {
        "document": document_to_dict(gold.document),
        "annotations": [annotation_to_dict(a) for a in gold.annotations],
        "relations": [relation_to_dict(r) for r in gold.relations],
        "provenance": gold.provenance,
        "segment": gold.segment.value,
        "iaa": gold.iaa_values,
    }


def gold_from_dict(data: dict) -> GoldDocument:
    return GoldDocument(
        document=document_from_dict(data["document"]),
        annotations=[annotation_from_dict(a) for a in data["annotations"]],
        relations=[relation_from_dict(r) for r in data["relations"]],
        provenance=data.get("provenance", {}),
        segment=SegmentLabel(data["segment"]),
        iaa_values={k: v for k, v in data["iaa"].items()},
    )


def optional_float(value) -> Optional[float]:
    return None if value is None else float(value)
