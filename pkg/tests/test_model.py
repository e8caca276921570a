"""Domain-object invariants: spans, annotations, relations, status machine."""

import pytest

from dupla.model import (
    Actor,
    Annotation,
    Document,
    DocumentStatus,
    ModelError,
    Role,
    Span,
    make_annotation,
    make_relation,
    shift_span,
)


class TestSpan:
    def test_valid(self):
        span = Span(0, 5)
        assert len(span) == 5

    def test_zero_length_rejected(self):
        with pytest.raises(ModelError):
            Span(5, 5)

    def test_negative_rejected(self):
        with pytest.raises(ModelError):
            Span(-1, 3)

    def test_inverted_rejected(self):
        with pytest.raises(ModelError):
            Span(7, 3)

    def test_overlap(self):
        assert Span(0, 5).overlaps(Span(4, 9))
        assert not Span(0, 5).overlaps(Span(5, 9))  # touching is not overlap
        assert Span(0, 5).overlap_length(Span(3, 9)) == 2


def make_doc(text="Paciente nega algia", status=DocumentStatus.IMPORTED):
    return Document(id="doc-1", text=text, section_map=[("body", Span(0, len(text)))], status=status)


class TestAnnotationConstruction:
    def test_empty_types_rejected(self):
        with pytest.raises(ModelError, match="non-empty"):
            Annotation(
                id="a1", doc_id="doc-1", annotator_id="x", span=Span(0, 3), types=frozenset()
            )

    def test_out_of_bounds_span_rejected(self, registry):
        doc = make_doc()
        with pytest.raises(ModelError, match="exceeds"):
            make_annotation(
                doc,
                registry,
                id="a1",
                annotator_id="x",
                span=Span(0, 1000),
                types=["Finding"],
            )

    def test_expansion_requires_abbreviation(self, registry):
        doc = make_doc()
        with pytest.raises(ModelError, match="Abbreviation"):
            make_annotation(
                doc,
                registry,
                id="a1",
                annotator_id="x",
                span=Span(0, 8),
                types=["Finding"],
                expansion="anything",
            )

    def test_expansion_with_abbreviation_ok(self, registry):
        doc = make_doc("UTI lotada")
        ann = make_annotation(
            doc,
            registry,
            id="a1",
            annotator_id="x",
            span=Span(0, 3),
            types=["Abbreviation"],
            expansion="Unidade de Terapia Intensiva",
        )
        assert ann.expansion == "Unidade de Terapia Intensiva"
        assert ann.types == frozenset({"ABBR"})

    def test_types_accept_names_and_codes(self, registry):
        doc = make_doc()
        ann = make_annotation(
            doc,
            registry,
            id="a1",
            annotator_id="x",
            span=Span(0, 8),
            types=["Sign or Symptom", "T033"],
        )
        assert ann.types == frozenset({"T184", "T033"})


class TestRelations:
    def build(self, registry):
        doc = make_doc()
        nega = make_annotation(
            doc, registry, id="n1", annotator_id="x", span=Span(9, 13), types=["Negation"]
        )
        algia = make_annotation(
            doc, registry, id="s1", annotator_id="x", span=Span(14, 19), types=["Sign or Symptom"]
        )
        return {"n1": nega, "s1": algia}

    def test_negation_relation(self, registry):
        anns = self.build(registry)
        rel = make_relation(
            registry, anns, id="r1", source_id="n1", target_id="s1", rtype="negation_of"
        )
        assert rel.rtype.value == "negation_of"

    def test_negation_source_must_be_negation(self, registry):
        anns = self.build(registry)
        with pytest.raises(ModelError, match="Negation-typed"):
            make_relation(
                registry, anns, id="r1", source_id="s1", target_id="n1", rtype="negation_of"
            )

    def test_self_relation_rejected(self, registry):
        anns = self.build(registry)
        with pytest.raises(ModelError, match="differ"):
            make_relation(
                registry, anns, id="r1", source_id="n1", target_id="n1", rtype="associated_with"
            )

    def test_missing_endpoint_rejected(self, registry):
        anns = self.build(registry)
        with pytest.raises(ModelError, match="does not exist"):
            make_relation(
                registry, anns, id="r1", source_id="n1", target_id="zz", rtype="associated_with"
            )

    def test_cross_annotator_rejected(self, registry):
        doc = make_doc()
        anns = self.build(registry)
        anns["other"] = make_annotation(
            doc, registry, id="other", annotator_id="y", span=Span(0, 8), types=["Finding"]
        )
        with pytest.raises(ModelError, match="same annotator"):
            make_relation(
                registry, anns, id="r1", source_id="n1", target_id="other", rtype="associated_with"
            )


class TestStatusMachine:
    def test_forward_progress(self):
        doc = make_doc()
        for status in (
            DocumentStatus.REVIEWED,
            DocumentStatus.ASSIGNED,
            DocumentStatus.ANNOTATED,
            DocumentStatus.ADJUDICATED,
        ):
            doc.advance_status(status)
        assert doc.status is DocumentStatus.ADJUDICATED

    def test_backwards_rejected(self):
        doc = make_doc(status=DocumentStatus.ASSIGNED)
        with pytest.raises(ModelError, match="backwards"):
            doc.advance_status(DocumentStatus.IMPORTED)

    def test_same_status_is_noop(self):
        doc = make_doc(status=DocumentStatus.REVIEWED)
        doc.advance_status(DocumentStatus.REVIEWED)
        assert doc.status is DocumentStatus.REVIEWED


class TestShiftSpan:
    def test_before_cut_untouched(self):
        assert shift_span(Span(0, 3), Span(5, 10), 5) == Span(0, 3)

    def test_after_cut_shifted(self):
        # Cut of 5 chars replaced by 3 -> delta -2.
        assert shift_span(Span(12, 15), Span(5, 10), 3) == Span(10, 13)

    def test_containing_cut_resized(self):
        assert shift_span(Span(0, 20), Span(5, 10), 3) == Span(0, 18)


class TestActor:
    def test_role_enum_coercion(self):
        actor = Actor(id="x", name="X", role="manager")
        assert actor.role is Role.MANAGER

    def test_bad_role_rejected(self):
        with pytest.raises(ValueError):
            Actor(id="x", name="X", role="intern")
