"""Record import, narrative assembly, and manual PHI redaction.

Source records arrive as JSON Lines whose keys follow the clinical
database's field names (hyphenated). The eight free-text fields are
concatenated into one annotatable narrative; each non-empty field gets a
``## field-name`` header line and a section-map entry covering its body.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Sequence

from .model import Actor, Annotation, Document, DocumentStatus, Role, Span, shift_span

logger = logging.getLogger(__name__)

PHI_PLACEHOLDER = "[PHI]"

# Free-text fields in the order they appear in the source schema; this order
# drives the narrative concatenation.
FREE_TEXT_FIELDS = (
    "main-complaint",
    "history-of-disease",
    "past-history",
    "family-history",
    "physical-examination",
    "main-diagnosis-hypothesis",
    "initial-plan",
    "observations",
)

STRUCTURED_FIELDS = (
    "occurrence-id",
    "patient-id",
    "gender",
    "birth-date",
    "inclusion-date",
    "discharge-date",
    "discharge-type",
    "discharge-reason",
    "icd-10",
    "medical-specialty",
    "care-reason",
)

_DATE_FIELDS = ("birth-date", "inclusion-date", "discharge-date")


class IngestError(Exception):
    """Raised when an import batch or a redaction is invalid."""


@dataclass(frozen=True)
class SourceRecord:
    """One database entry; structured metadata plus eight free-text fields."""

    occurrence_id: int
    structured: dict = field(default_factory=dict)
    free_text: dict = field(default_factory=dict)

    @classmethod
    def from_json_object(cls, obj: dict) -> "SourceRecord":
        if "occurrence-id" not in obj:
            raise IngestError("record is missing occurrence-id")
        unknown = set(obj) - set(STRUCTURED_FIELDS) - set(FREE_TEXT_FIELDS)
        if unknown:
            raise IngestError(f"unknown record fields: {sorted(unknown)}")
        occurrence_id = obj["occurrence-id"]
        if not isinstance(occurrence_id, int):
            raise IngestError(f"occurrence-id must be a number, got {occurrence_id!r}")
        for key in _DATE_FIELDS:
            value = obj.get(key)
            if value:
                try:
                    date.fromisoformat(value)
                except (TypeError, ValueError) as exc:
                    raise IngestError(f"record {occurrence_id}: bad {key}: {value!r}") from exc
        structured = {k: obj.get(k) for k in STRUCTURED_FIELDS}
        free_text = {k: str(obj.get(k) or "") for k in FREE_TEXT_FIELDS}
        return cls(occurrence_id=occurrence_id, structured=structured, free_text=free_text)

    def has_text(self) -> bool:
        return any(v.strip() for v in self.free_text.values())


def parse_jsonl(text: str) -> list[SourceRecord]:
    """Parse a JSON Lines batch; blank lines are skipped."""
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise IngestError(f"line {lineno}: expected a JSON object")
        records.append(SourceRecord.from_json_object(obj))
    return records


@dataclass
class ImportReport:
    documents: list[Document] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def assemble_text(record: SourceRecord) -> tuple[str, list[tuple[str, Span]]]:
    """Concatenate non-empty free-text fields with ## headers; map each body."""
    parts: list[str] = []
    sections: list[tuple[str, Span]] = []
    cursor = 0
    for name in FREE_TEXT_FIELDS:
        value = record.free_text.get(name, "")
        if not value.strip():
            continue
        if parts:
            cursor += 1  # separating newline before the next header
        header = f"## {name}\n"
        body_start = cursor + len(header)
        parts.append(header + value)
        sections.append((name, Span(body_start, body_start + len(value))))
        cursor = body_start + len(value)
    return "\n".join(parts), sections


def import_records(batch: Sequence[SourceRecord]) -> ImportReport:
    """Create one document per record; records with no narrative are skipped."""
    if not batch:
        raise IngestError("empty import batch")
    seen: set[int] = set()
    for record in batch:
        if record.occurrence_id in seen:
            raise IngestError(f"duplicate occurrence-id in batch: {record.occurrence_id}")
        seen.add(record.occurrence_id)

    report = ImportReport()
    for record in batch:
        if not record.has_text():
            report.skipped.append(record.occurrence_id)
            message = f"record {record.occurrence_id}: all free-text fields empty, skipped"
            report.warnings.append(message)
            logger.warning(message)
            continue
        text, sections = assemble_text(record)
        report.documents.append(
            Document(
                id=f"doc-{record.occurrence_id}",
                text=text,
                section_map=sections,
                status=DocumentStatus.IMPORTED,
                metadata=dict(record.structured),
            )
        )
    return report


@dataclass(frozen=True)
class Redaction:
    """Audit record of one applied PHI replacement (original text not kept)."""

    doc_id: str
    span: Span
    reviewer_id: str
    replacement: str = PHI_PLACEHOLDER


def mark_reviewed(doc: Document, reviewer: Actor) -> None:
    """PHI-review sign-off; required before a document can be assigned."""
    _check_reviewer(reviewer)
    if doc.status not in (DocumentStatus.IMPORTED, DocumentStatus.REVIEWED):
        raise IngestError("review window closed")
    doc.advance_status(DocumentStatus.REVIEWED)


def apply_redaction(
    doc: Document,
    span: Span,
    reviewer: Actor,
    annotations: Iterable[Annotation] = (),
) -> tuple[Redaction, list[Annotation]]:
    """Replace a span with the PHI placeholder, shifting every stored offset.

    Returns the audit record and offset-adjusted copies of any annotations
    passed in. Redaction is only possible before the document is assigned,
    and the span must sit inside a single section body so headers and the
    section map stay intact.
    """
    _check_reviewer(reviewer)
    if doc.status not in (DocumentStatus.IMPORTED, DocumentStatus.REVIEWED):
        raise IngestError("redaction window closed")
    doc.check_span(span)
    if doc.section_of(span) is None:
        raise IngestError("redaction span must fall within a single section body")

    doc.text = doc.text[: span.start] + PHI_PLACEHOLDER + doc.text[span.end :]
    doc.section_map = [
        (name, shift_span(body, span, len(PHI_PLACEHOLDER)))
        for name, body in doc.section_map
    ]
    shifted = [
        Annotation(
            id=a.id,
            doc_id=a.doc_id,
            annotator_id=a.annotator_id,
            span=shift_span(a.span, span, len(PHI_PLACEHOLDER)),
            types=a.types,
            expansion=a.expansion,
            created_round=a.created_round,
        )
        for a in annotations
    ]
    doc.advance_status(DocumentStatus.REVIEWED)
    return Redaction(doc_id=doc.id, span=span, reviewer_id=reviewer.id), shifted


def _check_reviewer(reviewer: Actor) -> None:
    if reviewer.role not in (Role.MANAGER, Role.ADJUDICATOR):
        raise IngestError(f"actor {reviewer.id} may not review documents")
