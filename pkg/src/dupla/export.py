"""Gold-standard export as standoff JSON or XML, plus dictionary extraction.

Exports are deterministic byte streams: annotations are ordered by
(start, end, first type code), relations by (source, target), and the JSON
key order is fixed, so exporting the same gold document twice yields
identical bytes and an export can be re-imported losslessly.
"""

from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ElementTree
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import quoteattr

from .adjudication import GOLD_ANNOTATOR, GoldDocument
from .agreement import SegmentLabel, VARIANTS
from .model import Annotation, Document, DocumentStatus, Relation, RelationType, Span
from .registry import Registry

logger = logging.getLogger(__name__)


class ExportError(Exception):
    """Raised for unexportable documents or unparseable export files."""


def _annotation_sort_key(payload: dict) -> tuple:
    return (payload["start"], payload["end"], payload["types"][0], payload["id"])


def gold_to_payload(gold: GoldDocument) -> dict:
    """Canonical dict form of a gold document (shared by JSON and XML)."""
    doc = gold.document
    if doc.status is not DocumentStatus.ADJUDICATED:
        raise ExportError(f"document {doc.id} is not adjudicated")
    annotations = []
    for ann in gold.annotations:
        entry = {
            "id": ann.id,
            "start": ann.span.start,
            "end": ann.span.end,
            "surface": doc.surface(ann.span),
            "types": sorted(ann.types),
        }
        if ann.expansion is not None:
            entry["expansion"] = ann.expansion
        annotations.append(entry)
    annotations.sort(key=_annotation_sort_key)
    relations = [
        {
            "id": rel.id,
            "source": rel.source_id,
            "target": rel.target_id,
            "rtype": rel.rtype.value,
        }
        for rel in gold.relations
    ]
    relations.sort(key=lambda r: (r["source"], r["target"], r["rtype"], r["id"]))
    return {
        "document": {
            "id": doc.id,
            "occurrence-id": doc.metadata.get("occurrence-id"),
            "medical-specialty": doc.metadata.get("medical-specialty"),
            "sections": [
                {"name": name, "start": body.start, "end": body.end}
                for name, body in doc.section_map
            ],
            "text": doc.text,
        },
        "annotations": annotations,
        "relations": relations,
        "segment": gold.segment.value,
        "iaa": {key: gold.iaa_values.get(key) for key in (*VARIANTS, "relations")},
    }


def export_gold(gold: GoldDocument, format: str = "json") -> bytes:
    if format == "json":
        return export_json(gold)
    if format == "xml":
        return export_xml(gold)
    raise ExportError(f"unknown export format: {format!r}")


def export_json(gold: GoldDocument) -> bytes:
    return payload_to_json(gold_to_payload(gold))


def payload_to_json(payload: dict) -> bytes:
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def export_xml(gold: GoldDocument) -> bytes:
    return payload_to_xml(gold_to_payload(gold))


def payload_to_xml(payload: dict) -> bytes:
    doc = payload["document"]
    lines = ['<?xml version="1.0" encoding="utf-8"?>']
    lines.append(f'<gold-document segment={quoteattr(payload["segment"])}>')
    doc_attrs = [f"id={quoteattr(doc['id'])}"]
    if doc.get("occurrence-id") is not None:
        doc_attrs.append(f'occurrence-id="{doc["occurrence-id"]}"')
    if doc.get("medical-specialty") is not None:
        doc_attrs.append(f"medical-specialty={quoteattr(doc['medical-specialty'])}")
    lines.append(f"  <document {' '.join(doc_attrs)}>")
    lines.append("    <sections>")
    for section in doc["sections"]:
        lines.append(
            f'      <section name={quoteattr(section["name"])} '
            f'start="{section["start"]}" end="{section["end"]}"/>'
        )
    lines.append("    </sections>")
    lines.append(f"    <text>{_cdata(doc['text'])}</text>")
    lines.append("  </document>")
    lines.append("  <annotations>")
    for ann in payload["annotations"]:
        attrs = [
            f"id={quoteattr(ann['id'])}",
            f'start="{ann["start"]}"',
            f'end="{ann["end"]}"',
            f"surface={quoteattr(ann['surface'])}",
            f"types={quoteattr(','.join(ann['types']))}",
        ]
        if "expansion" in ann:
            attrs.append(f"expansion={quoteattr(ann['expansion'])}")
        lines.append(f"    <annotation {' '.join(attrs)}/>")
    lines.append("  </annotations>")
    lines.append("  <relations>")
    for rel in payload["relations"]:
        lines.append(
            f'    <relation id={quoteattr(rel["id"])} source={quoteattr(rel["source"])} '
            f'target={quoteattr(rel["target"])} rtype={quoteattr(rel["rtype"])}/>'
        )
    lines.append("  </relations>")
    iaa_attrs = [
        f'{key}="{value!r}"'
        for key, value in payload["iaa"].items()
        if value is not None
    ]
    lines.append(f"  <iaa {' '.join(iaa_attrs)}/>" if iaa_attrs else "  <iaa/>")
    lines.append("</gold-document>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _cdata(text: str) -> str:
    return "<![CDATA[" + text.replace("]]>", "]]]]><![CDATA[>") + "]]>"


def parse_gold(data: bytes, format: str = "json") -> GoldDocument:
    if format == "json":
        return parse_gold_json(data)
    if format == "xml":
        return parse_gold_xml(data)
    raise ExportError(f"unknown export format: {format!r}")


def parse_gold_json(data: bytes) -> GoldDocument:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ExportError(f"invalid gold JSON: {exc}") from exc
    return payload_to_gold(payload)


def parse_gold_xml(data: bytes) -> GoldDocument:
    try:
        root = ElementTree.fromstring(data.decode("utf-8"))
    except (UnicodeDecodeError, ElementTree.ParseError) as exc:
        raise ExportError(f"invalid gold XML: {exc}") from exc
    if root.tag != "gold-document":
        raise ExportError(f"unexpected root element: {root.tag}")
    doc_el = root.find("document")
    text_el = doc_el.find("text") if doc_el is not None else None
    if doc_el is None or text_el is None:
        raise ExportError("gold XML is missing the document/text elements")
    occurrence = doc_el.get("occurrence-id")
    payload = {
        "document": {
            "id": doc_el.get("id"),
            "occurrence-id": int(occurrence) if occurrence is not None else None,
            "medical-specialty": doc_el.get("medical-specialty"),
            "sections": [
                {
                    "name": s.get("name"),
                    "start": int(s.get("start")),
                    "end": int(s.get("end")),
                }
                for s in doc_el.iterfind("sections/section")
            ],
            "text": text_el.text or "",
        },
        "annotations": [
            {
                "id": a.get("id"),
                "start": int(a.get("start")),
                "end": int(a.get("end")),
                "surface": a.get("surface"),
                "types": a.get("types", "").split(","),
                **({"expansion": a.get("expansion")} if a.get("expansion") is not None else {}),
            }
            for a in root.iterfind("annotations/annotation")
        ],
        "relations": [
            {
                "id": r.get("id"),
                "source": r.get("source"),
                "target": r.get("target"),
                "rtype": r.get("rtype"),
            }
            for r in root.iterfind("relations/relation")
        ],
        "segment": root.get("segment"),
        "iaa": {
            key: None if (raw := root.find("iaa").get(key)) is None else float(raw)
            for key in (*VARIANTS, "relations")
        },
    }
    return payload_to_gold(payload)


def payload_to_gold(payload: dict) -> GoldDocument:
    """Rebuild a gold document from its exported form, verifying integrity."""
    try:
        doc_payload = payload["document"]
        document = Document(
            id=doc_payload["id"],
            text=doc_payload["text"],
            section_map=[
                (s["name"], Span(s["start"], s["end"])) for s in doc_payload["sections"]
            ],
            status=DocumentStatus.ADJUDICATED,
            metadata={
                "occurrence-id": doc_payload.get("occurrence-id"),
                "medical-specialty": doc_payload.get("medical-specialty"),
            },
        )
        annotations = []
        for entry in payload["annotations"]:
            span = Span(entry["start"], entry["end"])
            if document.surface(span) != entry["surface"]:
                raise ExportError(
                    f"annotation {entry['id']}: surface does not match its span"
                )
            annotations.append(
                Annotation(
                    id=entry["id"],
                    doc_id=document.id,
                    annotator_id=GOLD_ANNOTATOR,
                    span=span,
                    types=frozenset(entry["types"]),
                    expansion=entry.get("expansion"),
                )
            )
        relations = [
            Relation(
                id=entry["id"],
                doc_id=document.id,
                annotator_id=GOLD_ANNOTATOR,
                source_id=entry["source"],
                target_id=entry["target"],
                rtype=RelationType(entry["rtype"]),
            )
            for entry in payload["relations"]
        ]
        segment = SegmentLabel(payload["segment"])
        iaa_values = {key: payload["iaa"].get(key) for key in (*VARIANTS, "relations")}
    except ExportError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ExportError(f"malformed gold payload: {exc}") from exc
    ann_ids = {a.id for a in annotations}
    for rel in relations:
        if rel.source_id not in ann_ids or rel.target_id not in ann_ids:
            raise ExportError(f"relation {rel.id} references a missing annotation")
    return GoldDocument(
        document=document,
        annotations=annotations,
        relations=relations,
        provenance={},
        segment=segment,
        iaa_values=iaa_values,
    )


# ---------------------------------------------------------------------------
# Dictionary extraction


@dataclass(frozen=True)
class DictionaryEntry:
    surface: str
    kind: str  # negation_cue | abbreviation
    frequency: int
    expansion: Optional[str] = None

    def __post_init__(self):
        if self.frequency < 1:
            raise ExportError("dictionary entries need frequency >= 1")
        if self.expansion is not None and self.kind != "abbreviation":
            raise ExportError("only abbreviation entries carry expansions")


def extract_dictionaries(
    corpus: Sequence[GoldDocument], registry: Registry
) -> tuple[list[DictionaryEntry], list[DictionaryEntry]]:
    """Harvest negation-cue and abbreviation dictionaries from gold documents.

    Surfaces are case-folded for counting; the most frequent original
    spelling is kept as the canonical surface. Entries come out ranked by
    descending frequency, ties broken alphabetically.
    """
    if not corpus:
        logger.warning("extracting dictionaries from an empty corpus")
    neg_code = registry.negation.code
    abbr_code = registry.abbreviation.code
    neg_counts: dict[str, dict] = {}
    abbr_counts: dict[str, dict] = {}

    def bump(table: dict, folded: str, raw: str, expansion: Optional[str]) -> None:
        slot = table.setdefault(folded, {"count": 0, "raw": {}, "expansions": {}})
        slot["count"] += 1
        slot["raw"][raw] = slot["raw"].get(raw, 0) + 1
        if expansion:
            slot["expansions"][expansion] = slot["expansions"].get(expansion, 0) + 1

    for gold in corpus:
        for ann in gold.annotations:
            raw = gold.document.surface(ann.span)
            folded = raw.casefold()
            if neg_code in ann.types:
                bump(neg_counts, folded, raw, None)
            if abbr_code in ann.types:
                bump(abbr_counts, folded, raw, ann.expansion)

    def most_frequent(table: dict) -> Optional[str]:
        if not table:
            return None
        return min(table.items(), key=lambda kv: (-kv[1], kv[0]))[0]

    def finalize(table: dict, kind: str) -> list[DictionaryEntry]:
        entries = []
        for folded, slot in table.items():
            entries.append(
                DictionaryEntry(
                    surface=most_frequent(slot["raw"]) or folded,
                    kind=kind,
                    frequency=slot["count"],
                    expansion=most_frequent(slot["expansions"]) if kind == "abbreviation" else None,
                )
            )
        entries.sort(key=lambda e: (-e.frequency, e.surface.casefold(), e.surface))
        return entries

    return finalize(neg_counts, "negation_cue"), finalize(abbr_counts, "abbreviation")


def dictionary_tsv(entries: Iterable[DictionaryEntry]) -> str:
    """Serialize dictionary entries as surface<TAB>frequency<TAB>expansion."""
    lines = ["# surface\tfrequency\texpansion"]
    for entry in entries:
        lines.append(f"{entry.surface}\t{entry.frequency}\t{entry.expansion or ''}")
    return "\n".join(lines) + "\n"
