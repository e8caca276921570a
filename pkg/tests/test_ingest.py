"""Import, narrative assembly, and PHI redaction."""

import random

import pytest

from dupla.ingest import (
    FREE_TEXT_FIELDS,
    IngestError,
    PHI_PLACEHOLDER,
    SourceRecord,
    apply_redaction,
    import_records,
    mark_reviewed,
    parse_jsonl,
)
from dupla.model import Actor, Annotation, DocumentStatus, ModelError, Role, Span


def record(occurrence_id=1, **free_text):
    return SourceRecord.from_json_object(
        {"occurrence-id": occurrence_id, **free_text}
    )


MANAGER = Actor(id="mgr", name="Manager", role=Role.MANAGER)
ANNOTATOR = Actor(id="ann", name="Annotator", role=Role.ANNOTATOR)


class TestParseJsonl:
    def test_basic(self):
        text = '{"occurrence-id": 1, "history-of-disease": "Paciente nega algia"}\n'
        records = parse_jsonl(text)
        assert len(records) == 1
        assert records[0].occurrence_id == 1

    def test_unknown_key_rejected(self):
        with pytest.raises(IngestError, match="unknown record fields"):
            parse_jsonl('{"occurrence-id": 1, "surprise-field": "x"}')

    def test_missing_occurrence_id_rejected(self):
        with pytest.raises(IngestError, match="occurrence-id"):
            parse_jsonl('{"history-of-disease": "x"}')

    def test_bad_date_rejected(self):
        with pytest.raises(IngestError, match="birth-date"):
            parse_jsonl('{"occurrence-id": 1, "birth-date": "31/12/1980"}')

    def test_bad_json_line_rejected(self):
        with pytest.raises(IngestError, match="line 2"):
            parse_jsonl('{"occurrence-id": 1}\nnot json')


class TestImport:
    def test_single_field_document(self):
        report = import_records([record(1, **{"history-of-disease": "Paciente nega algia"})])
        doc = report.documents[0]
        assert doc.text == "## history-of-disease\nPaciente nega algia"
        assert doc.section_map == [("history-of-disease", Span(22, 41))]
        assert doc.surface(doc.section_map[0][1]) == "Paciente nega algia"
        assert doc.status is DocumentStatus.IMPORTED

    def test_all_empty_record_skipped_with_warning(self):
        report = import_records([record(7)])
        assert report.documents == []
        assert report.skipped == [7]
        assert any("7" in w for w in report.warnings)

    def test_field_order_follows_schema(self):
        report = import_records(
            [record(2, **{"main-complaint": "dor", "observations": "obs"})]
        )
        doc = report.documents[0]
        names = [name for name, _ in doc.section_map]
        assert names == ["main-complaint", "observations"]
        # Section order must match the source schema's field order.
        indices = [FREE_TEXT_FIELDS.index(n) for n in names]
        assert indices == sorted(indices)
        assert doc.text == "## main-complaint\ndor\n## observations\nobs"

    def test_every_nonempty_field_reachable_once(self):
        values = {name: f"text for {name}" for name in FREE_TEXT_FIELDS}
        report = import_records([record(3, **values)])
        doc = report.documents[0]
        assert len(doc.section_map) == len(FREE_TEXT_FIELDS)
        for name, body in doc.section_map:
            assert doc.surface(body) == values[name]

    def test_duplicate_occurrence_id_rejects_batch(self):
        records = [
            record(5, **{"main-complaint": "a"}),
            record(5, **{"main-complaint": "b"}),
        ]
        with pytest.raises(IngestError, match="5"):
            import_records(records)

    def test_empty_batch_rejected(self):
        with pytest.raises(IngestError, match="empty"):
            import_records([])

    def test_structured_fields_kept_as_metadata(self):
        report = import_records(
            [
                SourceRecord.from_json_object(
                    {
                        "occurrence-id": 9,
                        "medical-specialty": "cardiology",
                        "icd-10": "I20",
                        "main-complaint": "dor",
                    }
                )
            ]
        )
        doc = report.documents[0]
        assert doc.metadata["medical-specialty"] == "cardiology"
        assert doc.metadata["icd-10"] == "I20"
        assert doc.metadata["occurrence-id"] == 9


class TestRedaction:
    def make_doc(self, text="Dr. Vital Brasil operou"):
        report = import_records([record(1, **{"observations": text})])
        return report.documents[0]

    def test_name_replaced_with_placeholder(self):
        doc = self.make_doc()
        body = doc.section_map[0][1]
        name_start = doc.text.index("Vital Brasil")
        span = Span(name_start, name_start + len("Vital Brasil"))
        redaction, _ = apply_redaction(doc, span, MANAGER)
        assert doc.surface(doc.section_map[0][1]) == "Dr. [PHI] operou"
        assert doc.status is DocumentStatus.REVIEWED
        assert redaction.replacement == PHI_PLACEHOLDER

    def test_zero_length_span_impossible(self):
        with pytest.raises(ModelError):
            Span(4, 4)

    def test_out_of_bounds_rejected(self):
        doc = self.make_doc()
        with pytest.raises(ModelError, match="exceeds"):
            apply_redaction(doc, Span(0, 10_000), MANAGER)

    def test_annotator_cannot_redact(self):
        doc = self.make_doc()
        with pytest.raises(IngestError, match="may not review"):
            apply_redaction(doc, Span(22, 30), ANNOTATOR)

    def test_window_closes_after_assignment(self):
        doc = self.make_doc()
        doc.advance_status(DocumentStatus.REVIEWED)
        doc.advance_status(DocumentStatus.ASSIGNED)
        with pytest.raises(IngestError, match="window closed"):
            apply_redaction(doc, Span(22, 30), MANAGER)

    def test_header_redaction_rejected(self):
        doc = self.make_doc()
        with pytest.raises(IngestError, match="single section"):
            apply_redaction(doc, Span(0, 5), MANAGER)  # inside "## observations"

    def test_disjoint_redactions_commute(self):
        base = "A Maria e o Pedro estiveram na consulta ontem pela manha"
        spans = (Span(2, 7), Span(12, 17))  # "Maria", "Pedro" inside the body
        texts = []
        for order in (spans, spans[::-1]):
            doc = self.make_doc(base)
            body_start = doc.section_map[0][1].start
            first = Span(order[0].start + body_start, order[0].end + body_start)
            redaction, _ = apply_redaction(doc, first, MANAGER)
            # Second span must be re-based against the updated text.
            delta = len(PHI_PLACEHOLDER) - len(first)
            second = order[1]
            start = second.start + body_start
            if start > first.start:
                start += delta
            apply_redaction(doc, Span(start, start + len(second)), MANAGER)
            texts.append(doc.text)
        assert texts[0] == texts[1]
        assert texts[0].count(PHI_PLACEHOLDER) == 2

    def test_offsets_still_select_same_tokens(self):
        # Spans outside the redaction keep selecting the same surface.
        rng = random.Random(31)
        for _ in range(50):
            text = " ".join(
                "".join(rng.choice("abcdef") for _ in range(rng.randint(2, 6)))
                for _ in range(12)
            )
            doc = self.make_doc(text)
            body = doc.section_map[0][1]
            cut_start = rng.randrange(body.start, body.end - 3)
            cut = Span(cut_start, cut_start + rng.randint(1, 3))
            keep_spans = []
            for _ in range(5):
                start = rng.randrange(body.start, body.end - 2)
                span = Span(start, start + rng.randint(1, 2))
                if span.end <= cut.start or span.start >= cut.end:
                    keep_spans.append((span, doc.surface(span)))
            annotations = [
                Annotation(
                    id=f"k{i}",
                    doc_id=doc.id,
                    annotator_id="ann",
                    span=span,
                    types=frozenset({"T033"}),
                )
                for i, (span, _) in enumerate(keep_spans)
            ]
            _, shifted = apply_redaction(doc, cut, MANAGER, annotations)
            for (span, surface), new_ann in zip(keep_spans, shifted):
                assert doc.surface(new_ann.span) == surface

    def test_mark_reviewed(self):
        doc = self.make_doc()
        mark_reviewed(doc, MANAGER)
        assert doc.status is DocumentStatus.REVIEWED
        with pytest.raises(IngestError):
            mark_reviewed(self.make_doc(), ANNOTATOR)
