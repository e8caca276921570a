"""Domain objects shared by every part of the workbench.

Offsets everywhere are 0-based code-point offsets, end-exclusive.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .registry import Registry


class ModelError(Exception):
    """Raised when a domain invariant would be violated."""


class Role(str, enum.Enum):
    ANNOTATOR = "annotator"
    ADJUDICATOR = "adjudicator"
    MANAGER = "manager"


class DocumentStatus(str, enum.Enum):
    IMPORTED = "imported"
    REVIEWED = "reviewed"
    ASSIGNED = "assigned"
    ANNOTATED = "annotated"
    ADJUDICATED = "adjudicated"


_STATUS_ORDER = list(DocumentStatus)


class RelationType(str, enum.Enum):
    ASSOCIATED_WITH = "associated_with"
    NEGATION_OF = "negation_of"


@dataclass(frozen=True, order=True)
class Span:
    """Half-open character interval [start, end)."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise ModelError(f"invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def overlap_length(self, other: "Span") -> int:
        return max(0, min(self.end, other.end) - max(self.start, other.start))

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class Actor:
    id: str
    name: str
    role: Role
    profile: str = ""

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))


@dataclass(frozen=True)
class Annotation:
    """A typed span produced by one annotator on one document."""

    id: str
    doc_id: str
    annotator_id: str
    span: Span
    types: frozenset[str]
    expansion: Optional[str] = None
    created_round: int = 0

    def __post_init__(self):
        object.__setattr__(self, "types", frozenset(self.types))
        if not self.types:
            raise ModelError(f"annotation {self.id}: types must be non-empty")

    def sort_key(self):
        return (self.span.start, self.span.end, tuple(sorted(self.types)), self.id)


@dataclass(frozen=True)
class Relation:
    """Directed typed edge between two annotations of the same annotator."""

    id: str
    doc_id: str
    annotator_id: str
    source_id: str
    target_id: str
    rtype: RelationType

    def __post_init__(self):
        object.__setattr__(self, "rtype", RelationType(self.rtype))
        if self.source_id == self.target_id:
            raise ModelError(f"relation {self.id}: source and target must differ")


@dataclass
class Document:
    """An importable narrative with its section layout and workflow status."""

    id: str
    text: str
    section_map: list[tuple[str, Span]] = field(default_factory=list)
    status: DocumentStatus = DocumentStatus.IMPORTED
    metadata: dict = field(default_factory=dict)

    def advance_status(self, new_status: DocumentStatus) -> None:
        """Move the document forward; going backwards is an error."""
        new_status = DocumentStatus(new_status)
        if _STATUS_ORDER.index(new_status) < _STATUS_ORDER.index(self.status):
            raise ModelError(
                f"document {self.id}: cannot move status backwards "
                f"({self.status.value} -> {new_status.value})"
            )
        self.status = new_status

    def check_span(self, span: Span) -> None:
        if span.end > len(self.text):
            raise ModelError(
                f"document {self.id}: span [{span.start}, {span.end}) exceeds "
                f"text length {len(self.text)}"
            )

    def surface(self, span: Span) -> str:
        self.check_span(span)
        return self.text[span.start : span.end]

    def section_of(self, span: Span) -> Optional[str]:
        for name, body in self.section_map:
            if body.contains(span):
                return name
        return None


def make_annotation(
    document: Document,
    registry: Registry,
    *,
    id: str,
    annotator_id: str,
    span: Span,
    types: Iterable[str],
    expansion: Optional[str] = None,
    created_round: int = 0,
) -> Annotation:
    """Construct a fully validated annotation against its document.

    Types may be given as codes or display names; they are stored as codes.
    An expansion is only legal on annotations typed Abbreviation.
    """
    document.check_span(span)
    codes = registry.resolve_codes(types)
    if not codes:
        raise ModelError("annotation types must be non-empty")
    if expansion is not None and registry.abbreviation.code not in codes:
        raise ModelError("expansion is only allowed on Abbreviation-typed annotations")
    return Annotation(
        id=id,
        doc_id=document.id,
        annotator_id=annotator_id,
        span=span,
        types=codes,
        expansion=expansion,
        created_round=created_round,
    )


def make_relation(
    registry: Registry,
    annotations_by_id: dict[str, Annotation],
    *,
    id: str,
    source_id: str,
    target_id: str,
    rtype: RelationType | str,
) -> Relation:
    """Construct a validated relation between two existing annotations."""
    rtype = RelationType(rtype)
    source = annotations_by_id.get(source_id)
    target = annotations_by_id.get(target_id)
    if source is None or target is None:
        missing = source_id if source is None else target_id
        raise ModelError(f"relation endpoint {missing!r} does not exist")
    if source.doc_id != target.doc_id:
        raise ModelError("relation endpoints must belong to the same document")
    if source.annotator_id != target.annotator_id:
        raise ModelError("relation endpoints must belong to the same annotator")
    if rtype is RelationType.NEGATION_OF and registry.negation.code not in source.types:
        raise ModelError("negation_of relations must start at a Negation-typed annotation")
    return Relation(
        id=id,
        doc_id=source.doc_id,
        annotator_id=source.annotator_id,
        source_id=source_id,
        target_id=target_id,
        rtype=rtype,
    )


def shift_span(span: Span, cut: Span, replacement_length: int) -> Span:
    """Remap a span after ``cut`` was replaced by ``replacement_length`` chars.

    Positions before the cut are unchanged, positions after it shift by the
    length delta. A span that overlaps the cut is clamped so it still covers
    the replacement region it intersected.
    """
    delta = replacement_length - len(cut)

    def map_start(pos: int) -> int:
        if pos <= cut.start:
            return pos
        if pos >= cut.end:
            return pos + delta
        return cut.start

    def map_end(pos: int) -> int:
        if pos <= cut.start:
            return pos
        if pos >= cut.end:
            return pos + delta
        return cut.start + replacement_length

    return Span(map_start(span.start), map_end(span.end))


def clone_document(doc: Document) -> Document:
    return Document(
        id=doc.id,
        text=doc.text,
        section_map=list(doc.section_map),
        status=doc.status,
        metadata=dict(doc.metadata),
    )


__all__ = [
    "Actor",
    "Annotation",
    "Document",
    "DocumentStatus",
    "ModelError",
    "Relation",
    "RelationType",
    "Role",
    "Span",
    "clone_document",
    "make_annotation",
    "make_relation",
    "shift_span",
]
