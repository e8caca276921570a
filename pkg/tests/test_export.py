"""Gold export: schema, determinism, round-trips, dictionaries."""

import json
import xml.etree.ElementTree as ElementTree

import pytest

from dupla.adjudication import (
    AdjudicationDecision,
    adjudicate,
    compute_divergence,
)
from dupla.agreement import compute_document_agreement
from dupla.export import (
    DictionaryEntry,
    ExportError,
    dictionary_tsv,
    export_gold,
    extract_dictionaries,
    gold_to_payload,
    parse_gold,
    parse_gold_json,
    parse_gold_xml,
    payload_to_json,
)
from dupla.ingest import import_records, mark_reviewed, SourceRecord
from dupla.model import Actor, Annotation, DocumentStatus, Relation, RelationType, Role, Span

ADJUDICATOR = Actor(id="adj", name="Adjudicator", role=Role.ADJUDICATOR)
MANAGER = Actor(id="mgr", name="Manager", role=Role.MANAGER)


def build_document(text="Paciente nega algia com dipirona", occurrence_id=42):
    report = import_records(
        [
            SourceRecord.from_json_object(
                {
                    "occurrence-id": occurrence_id,
                    "medical-specialty": "cardiology",
                    "history-of-disease": text,
                }
            )
        ]
    )
    doc = report.documents[0]
    mark_reviewed(doc, MANAGER)
    doc.advance_status(DocumentStatus.ASSIGNED)
    doc.advance_status(DocumentStatus.ANNOTATED)
    return doc


def annotate(doc, annotator, offset_pairs):
    """offset_pairs: list of (id, start, end, types, expansion?) in body offsets."""
    body = doc.section_map[0][1]
    annotations = []
    for entry in offset_pairs:
        ann_id, start, end, types = entry[:4]
        expansion = entry[4] if len(entry) > 4 else None
        annotations.append(
            Annotation(
                id=ann_id,
                doc_id=doc.id,
                annotator_id=annotator,
                span=Span(body.start + start, body.start + end),
                types=frozenset(types),
                expansion=expansion,
            )
        )
    return annotations


def make_gold(registry, *, keep_everything=True):
    doc = build_document()
    # body: "Paciente nega algia com dipirona"
    #        0........9....14.....20..24......
    set_a = annotate(
        doc,
        "ana",
        [
            ("a1", 0, 8, ["T101"]),
            ("a2", 9, 13, ["NEG"]),
            ("a3", 14, 19, ["T184"]),
            ("a4", 24, 32, ["T109"]),
        ],
    )
    set_b = annotate(
        doc,
        "bruno",
        [
            ("b1", 0, 8, ["T101"]),
            ("b2", 9, 13, ["NEG"]),
            ("b3", 14, 19, ["T184"]),
            ("b4", 24, 32, ["T121"]),  # type disagrees with a4
        ],
    )
    rels_a = [
        Relation(
            id="ra1",
            doc_id=doc.id,
            annotator_id="ana",
            source_id="a2",
            target_id="a3",
            rtype=RelationType.NEGATION_OF,
        )
    ]
    rels_b = [
        Relation(
            id="rb1",
            doc_id=doc.id,
            annotator_id="bruno",
            source_id="b2",
            target_id="b3",
            rtype=RelationType.NEGATION_OF,
        )
    ]
    divergence = compute_divergence(doc, set_a, set_b, rels_a, rels_b, registry)
    report = compute_document_agreement(doc.id, set_a, set_b, rels_a, rels_b, registry)
    kept = frozenset({"a4"}) if keep_everything else frozenset()
    decision = AdjudicationDecision(adjudicator=ADJUDICATOR, kept=kept)
    return adjudicate(doc, divergence, decision, report)


class TestJsonExport:
    def test_schema_keys(self, registry):
        payload = gold_to_payload(make_gold(registry))
        assert list(payload) == ["document", "annotations", "relations", "segment", "iaa"]
        assert list(payload["document"]) == [
            "id",
            "occurrence-id",
            "medical-specialty",
            "sections",
            "text",
        ]
        assert payload["segment"] in ("gold", "platinum")
        assert set(payload["iaa"]) == {"strict", "lenient", "flexible", "relaxed", "relations"}
        for entry in payload["annotations"]:
            assert entry["surface"] == payload["document"]["text"][entry["start"] : entry["end"]]

    def test_deterministic_bytes(self, registry):
        gold = make_gold(registry)
        assert export_gold(gold, "json") == export_gold(gold, "json")

    def test_annotation_ordering(self, registry):
        payload = gold_to_payload(make_gold(registry))
        keys = [(a["start"], a["end"], a["types"][0]) for a in payload["annotations"]]
        assert keys == sorted(keys)

    def test_unadjudicated_rejected(self, registry):
        gold = make_gold(registry)
        gold.document.status = DocumentStatus.ANNOTATED
        with pytest.raises(ExportError, match="not adjudicated"):
            export_gold(gold, "json")

    def test_round_trip_bytes_identical(self, registry):
        gold = make_gold(registry)
        blob = export_gold(gold, "json")
        assert export_gold(parse_gold_json(blob), "json") == blob

    def test_unknown_format_rejected(self, registry):
        with pytest.raises(ExportError, match="format"):
            export_gold(make_gold(registry), "yaml")


class TestXmlExport:
    def test_well_formed_and_cdata(self, registry):
        blob = export_gold(make_gold(registry), "xml")
        root = ElementTree.fromstring(blob)
        assert root.tag == "gold-document"
        assert root.find("document/text").text.startswith("## history-of-disease")
        annotations = root.findall("annotations/annotation")
        assert annotations and all(len(a) == 0 for a in annotations)  # empty elements

    def test_xml_round_trip_bytes_identical(self, registry):
        gold = make_gold(registry)
        blob = export_gold(gold, "xml")
        assert export_gold(parse_gold_xml(blob), "xml") == blob

    def test_cross_format_same_model(self, registry):
        gold = make_gold(registry)
        from_json = parse_gold(export_gold(gold, "json"), "json")
        from_xml = parse_gold(export_gold(gold, "xml"), "xml")
        assert gold_to_payload(from_json) == gold_to_payload(from_xml)

    def test_cdata_escape_hatch(self, registry):
        gold = make_gold(registry)
        gold.document.text += " ]]> tricky"
        blob = export_gold(gold, "xml")
        root = ElementTree.fromstring(blob)
        assert root.find("document/text").text.endswith("]]> tricky")


class TestParseValidation:
    def test_surface_mismatch_rejected(self, registry):
        blob = export_gold(make_gold(registry), "json")
        payload = json.loads(blob)
        payload["annotations"][0]["surface"] = "forged"
        with pytest.raises(ExportError, match="surface"):
            parse_gold_json(payload_to_json(payload))

    def test_dangling_relation_rejected(self, registry):
        blob = export_gold(make_gold(registry), "json")
        payload = json.loads(blob)
        if payload["relations"]:
            payload["relations"][0]["source"] = "missing"
            with pytest.raises(ExportError, match="missing"):
                parse_gold_json(payload_to_json(payload))


class TestDictionaries:
    def gold_with_cues(self, registry):
        doc = build_document("Paciente nega algia e nega febre na UTI")
        #                      0........9....14....20..26...31...36
        set_a = annotate(
            doc,
            "ana",
            [
                ("a1", 9, 13, ["NEG"]),
                ("a2", 22, 26, ["NEG"]),
                ("a3", 36, 39, ["ABBR"], "Unidade de Terapia Intensiva"),
            ],
        )
        set_b = annotate(
            doc,
            "bruno",
            [
                ("b1", 9, 13, ["NEG"]),
                ("b2", 22, 26, ["NEG"]),
                ("b3", 36, 39, ["ABBR"], "Unidade de Terapia Intensiva"),
            ],
        )
        divergence = compute_divergence(doc, set_a, set_b, [], [], registry)
        report = compute_document_agreement(doc.id, set_a, set_b, [], [], registry)
        return adjudicate(
            doc, divergence, AdjudicationDecision(adjudicator=ADJUDICATOR), report
        )

    def test_negation_counts(self, registry):
        negation, _ = extract_dictionaries([self.gold_with_cues(registry)], registry)
        entries = {e.surface: e.frequency for e in negation}
        assert entries == {"nega": 2}

    def test_abbreviation_expansion_attached(self, registry):
        _, abbreviation = extract_dictionaries([self.gold_with_cues(registry)], registry)
        assert len(abbreviation) == 1
        assert abbreviation[0].surface == "UTI"
        assert abbreviation[0].expansion == "Unidade de Terapia Intensiva"

    def test_no_negations_yields_empty_dict(self, registry):
        gold = make_gold(registry)
        # make_gold's fixture has one negation; rebuild a gold with none
        gold.annotations = [a for a in gold.annotations if "NEG" not in a.types]
        negation, _ = extract_dictionaries([gold], registry)
        assert negation == []

    def test_frequency_rank_and_case_folding(self, registry):
        doc = build_document("SEM dor sem febre Sem nada nega tudo")
        #                     0...4...8...12....18..22...27...32
        set_a = annotate(
            doc,
            "ana",
            [
                ("a1", 0, 3, ["NEG"]),
                ("a2", 8, 11, ["NEG"]),
                ("a3", 18, 21, ["NEG"]),
                ("a4", 27, 31, ["NEG"]),
            ],
        )
        set_b = annotate(
            doc,
            "bruno",
            [
                ("b1", 0, 3, ["NEG"]),
                ("b2", 8, 11, ["NEG"]),
                ("b3", 18, 21, ["NEG"]),
                ("b4", 27, 31, ["NEG"]),
            ],
        )
        divergence = compute_divergence(doc, set_a, set_b, [], [], registry)
        report = compute_document_agreement(doc.id, set_a, set_b, [], [], registry)
        gold = adjudicate(
            doc, divergence, AdjudicationDecision(adjudicator=ADJUDICATOR), report
        )
        negation, _ = extract_dictionaries([gold], registry)
        assert [(e.surface.casefold(), e.frequency) for e in negation] == [
            ("sem", 3),
            ("nega", 1),
        ]
        # Canonical surface is the most frequent raw spelling (ties -> smallest).
        assert negation[0].surface in ("SEM", "sem", "Sem")

    def test_tsv_format(self):
        entries = [
            DictionaryEntry(surface="nega", kind="negation_cue", frequency=2),
            DictionaryEntry(
                surface="UTI",
                kind="abbreviation",
                frequency=1,
                expansion="Unidade de Terapia Intensiva",
            ),
        ]
        text = dictionary_tsv(entries)
        lines = text.strip().splitlines()
        assert lines[1] == "nega\t2\t"
        assert lines[2] == "UTI\t1\tUnidade de Terapia Intensiva"

    def test_entry_invariants(self):
        with pytest.raises(ExportError):
            DictionaryEntry(surface="x", kind="negation_cue", frequency=0)
        with pytest.raises(ExportError):
            DictionaryEntry(surface="x", kind="negation_cue", frequency=1, expansion="y")
