"""Command-line interface for desk-scale corpus work and for serving the API.

Storage-backed subcommands (import, review, assign, export, dictionaries)
operate directly on the embedded store; `iaa` and `segment` work on plain
files so reports can be produced from exported artifacts alone.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, serialize
from .agreement import (
    VARIANTS,
    compute_document_agreement,
    segment as segment_value,
    strength_label,
)
from .config import ConfigError, load_config
from .export import ExportError, dictionary_tsv, export_gold, extract_dictionaries
from .ingest import IngestError, import_records, mark_reviewed, parse_jsonl
from .model import Actor, Annotation, ModelError, Relation, RelationType, Role, Span
from .registry import RegistryError, default_registry
from .storage import Storage
from .workflow import WorkflowError, assign as assign_documents


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except (IngestError, ExportError, WorkflowError, ModelError, RegistryError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dupla", description=__doc__)
    parser.add_argument("--version", action="version", version=f"dupla {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("import", help="import a JSON Lines batch of source records")
    p.add_argument("records", help="JSON Lines file")
    p.add_argument("--storage", required=True, help="storage database path")
    p.add_argument(
        "--mark-reviewed",
        action="store_true",
        help="sign off PHI review immediately (records had no PHI)",
    )
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("review", help="sign off PHI review for documents")
    p.add_argument("--storage", required=True)
    p.add_argument("--doc", action="append", default=[], help="document id (repeatable)")
    p.add_argument("--all", action="store_true", help="review every imported document")
    p.set_defaults(func=cmd_review)

    p = sub.add_parser("assign", help="randomly assign annotator pairs and adjudicators")
    p.add_argument("--storage", required=True)
    p.add_argument("--batch", required=True, help="file with one document id per line")
    p.add_argument("--annotators", required=True, help="comma-separated annotator ids")
    p.add_argument("--adjudicators", required=True, help="comma-separated adjudicator ids")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--round", type=int, default=1)
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("iaa", help="score a double-annotated document file")
    p.add_argument("--doc", required=True, help="pair-dump JSON file (see README)")
    p.add_argument("--variant", default="all", choices=("all",) + VARIANTS)
    p.add_argument("--per-type", action="store_true")
    p.add_argument("--threshold", type=float, default=0.67)
    p.set_defaults(func=cmd_iaa)

    p = sub.add_parser("segment", help="split exported gold files into gold/platinum")
    p.add_argument("--corpus", required=True, help="directory of exported gold JSON files")
    p.add_argument("--variant", default="strict", choices=VARIANTS)
    p.add_argument("--threshold", type=float, default=0.67)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("export", help="export an adjudicated document")
    p.add_argument("--storage", required=True)
    p.add_argument("--doc", required=True)
    p.add_argument("--format", default="json", choices=("json", "xml"))
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("dictionaries", help="extract negation/abbreviation dictionaries")
    p.add_argument("--storage", required=True)
    p.add_argument("--kind", required=True, choices=("negation", "abbreviation"))
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_dictionaries)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--config", required=True, help="project config JSON")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def cmd_import(args) -> int:
    text = Path(args.records).read_text("utf-8")
    report = import_records(parse_jsonl(text))
    storage = Storage(args.storage)
    reviewer = Actor(id="cli-manager", name="cli manager", role=Role.MANAGER)
    for doc in report.documents:
        if args.mark_reviewed:
            mark_reviewed(doc, reviewer)
        storage.put(
            "document", doc.id, serialize.document_to_dict(doc), actor="cli", action="import"
        )
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(json.dumps({"imported": [d.id for d in report.documents], "skipped": report.skipped}))
    return 0


def cmd_review(args) -> int:
    storage = Storage(args.storage)
    reviewer = Actor(id="cli-manager", name="cli manager", role=Role.MANAGER)
    doc_ids = list(args.doc)
    if args.all:
        doc_ids = [doc_id for doc_id, _ in storage.list("document")]
    if not doc_ids:
        print("error: pass --doc or --all", file=sys.stderr)
        return 2
    reviewed = []
    for doc_id in doc_ids:
        data = storage.get("document", doc_id)
        if data is None:
            print(f"error: document {doc_id} not found", file=sys.stderr)
            return 1
        doc = serialize.document_from_dict(data)
        if doc.status.value != "imported":
            continue
        mark_reviewed(doc, reviewer)
        storage.put("document", doc.id, serialize.document_to_dict(doc), actor="cli", action="review")
        reviewed.append(doc_id)
    print(json.dumps({"reviewed": reviewed}))
    return 0


def cmd_assign(args) -> int:
    storage = Storage(args.storage)
    doc_ids = [
        line.strip()
        for line in Path(args.batch).read_text("utf-8").splitlines()
        if line.strip()
    ]
    docs = []
    for doc_id in doc_ids:
        data = storage.get("document", doc_id)
        if data is None:
            print(f"error: document {doc_id} not found", file=sys.stderr)
            return 1
        docs.append(serialize.document_from_dict(data))
    annotators = [
        Actor(id=a.strip(), name=a.strip(), role=Role.ANNOTATOR)
        for a in args.annotators.split(",")
        if a.strip()
    ]
    adjudicators = [
        Actor(id=a.strip(), name=a.strip(), role=Role.ADJUDICATOR)
        for a in args.adjudicators.split(",")
        if a.strip()
    ]
    assignments = assign_documents(docs, annotators, adjudicators, args.seed, args.round)
    for doc in docs:
        storage.put("document", doc.id, serialize.document_to_dict(doc), actor="cli", action="assign")
    for assignment in assignments:
        storage.put(
            "assignment",
            assignment.doc_id,
            serialize.assignment_to_dict(assignment),
            actor="cli",
            action="assign",
        )
    print(json.dumps({"assignments": [serialize.assignment_to_dict(a) for a in assignments]}, indent=2))
    return 0


def _parse_pair_file(path: str):
    payload = json.loads(Path(path).read_text("utf-8"))
    doc_payload = payload["document"]
    doc_id = doc_payload["id"]
    annotators = payload["annotators"]
    if len(annotators) != 2:
        raise IngestError(f"pair file needs exactly two annotators, got {len(annotators)}")
    sides = []
    for annotator_id, work in sorted(annotators.items()):
        annotations = [
            Annotation(
                id=entry["id"],
                doc_id=doc_id,
                annotator_id=annotator_id,
                span=Span(entry["start"], entry["end"]),
                types=frozenset(entry["types"]),
                expansion=entry.get("expansion"),
            )
            for entry in work.get("annotations", [])
        ]
        relations = [
            Relation(
                id=entry["id"],
                doc_id=doc_id,
                annotator_id=annotator_id,
                source_id=entry["source"],
                target_id=entry["target"],
                rtype=RelationType(entry["rtype"]),
            )
            for entry in work.get("relations", [])
        ]
        sides.append((annotations, relations))
    return doc_id, sides


def cmd_iaa(args) -> int:
    registry = default_registry()
    doc_id, sides = _parse_pair_file(args.doc)
    (set_a, rels_a), (set_b, rels_b) = sides
    report = compute_document_agreement(
        doc_id, set_a, set_b, rels_a, rels_b, registry, per_type=args.per_type
    )
    values = report.values
    if args.variant != "all":
        values = {args.variant: report.values[args.variant]}
    payload = {
        "doc": doc_id,
        "values": values,
        "labels": {
            v: strength_label(x) if x is not None else None for v, x in values.items()
        },
        "relations": report.relations,
        "per_rtype": report.per_rtype,
    }
    chosen = report.values.get("strict" if args.variant == "all" else args.variant)
    if chosen is not None:
        payload["segment"] = segment_value(chosen, args.threshold).value
    if args.per_type:
        payload["per_type"] = report.per_type
    print(json.dumps(payload, indent=2, ensure_ascii=False))
    return 0


def cmd_segment(args) -> int:
    corpus_dir = Path(args.corpus)
    manifest = {}
    counts = {"gold": 0, "platinum": 0}
    for path in sorted(corpus_dir.glob("*.json")):
        payload = json.loads(path.read_text("utf-8"))
        value = payload.get("iaa", {}).get(args.variant)
        if value is None:
            print(f"warning: {path.name} has no {args.variant} value, skipped", file=sys.stderr)
            continue
        label = segment_value(value, args.threshold).value
        manifest[payload["document"]["id"]] = {"segment": label, "value": value}
        counts[label] += 1
    print(
        json.dumps(
            {
                "variant": args.variant,
                "threshold": args.threshold,
                "counts": counts,
                "documents": manifest,
            },
            indent=2,
        )
    )
    return 0


def cmd_export(args) -> int:
    storage = Storage(args.storage)
    data = storage.get("gold", args.doc)
    if data is None:
        print(f"error: document {args.doc} has no gold standard", file=sys.stderr)
        return 1
    gold = serialize.gold_from_dict(data)
    blob = export_gold(gold, args.format)
    if args.output:
        Path(args.output).write_bytes(blob)
    else:
        sys.stdout.buffer.write(blob)
    return 0


def cmd_dictionaries(args) -> int:
    storage = Storage(args.storage)
    registry = default_registry()
    golds = [serialize.gold_from_dict(data) for _, data in storage.list("gold")]
    negation, abbreviation = extract_dictionaries(golds, registry)
    entries = negation if args.kind == "negation" else abbreviation
    text = dictionary_tsv(entries)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = load_config(args.config)
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
