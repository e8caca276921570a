"""Agreement engine: fixtures from the operation contracts plus properties."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dupla.agreement import (
    AgreementError,
    CorpusAgreement,
    DocumentAgreement,
    SegmentLabel,
    VARIANTS,
    aggregate,
    agreement_value,
    all_variant_values,
    compute_document_agreement,
    iaa,
    pair_annotations,
    per_type_iaa,
    relation_iaa,
    reliability_flag,
    segment,
    strength_label,
)
from dupla.model import Relation, RelationType

from .conftest import ann, random_instance
from .oracle import oracle_pairing

S = "Sign or Symptom"
F = "Finding"


def e1_sides():
    set_a = [ann("a1", 0, 5, S), ann("a2", 10, 15, F)]
    set_b = [ann("b1", 0, 5, S, annotator="ann-b"), ann("b2", 10, 14, F, annotator="ann-b")]
    return set_a, set_b


class TestPairing:
    def test_identical_single_annotation_strict(self, registry):
        set_a = [ann("a1", 0, 5, S)]
        set_b = [ann("b1", 0, 5, S, annotator="ann-b")]
        pairing = pair_annotations(set_a, set_b, "strict", registry)
        assert len(pairing.full_pairs) == 1
        assert pairing.half_pairs == []
        assert pairing.unpaired == []

    def test_e1_strict(self, registry):
        set_a, set_b = e1_sides()
        pairing = pair_annotations(set_a, set_b, "strict", registry)
        assert [(a.id, b.id) for a, b in pairing.full_pairs] == [("a1", "b1")]
        assert {x.id for x in pairing.unpaired} == {"a2", "b2"}
        assert iaa(pairing) == pytest.approx(1 / 3, abs=1e-12)

    def test_e1_lenient(self, registry):
        set_a, set_b = e1_sides()
        pairing = pair_annotations(set_a, set_b, "lenient", registry)
        assert [(a.id, b.id) for a, b in pairing.full_pairs] == [("a1", "b1")]
        assert [(a.id, b.id) for a, b in pairing.half_pairs] == [("a2", "b2")]
        assert pairing.unpaired == []
        assert iaa(pairing) == pytest.approx(0.75, abs=1e-12)

    def test_type_mismatch_strict_vs_flexible(self, registry):
        set_a = [ann("a1", 0, 5, S)]
        set_b = [ann("b1", 0, 5, F, annotator="ann-b")]
        strict = pair_annotations(set_a, set_b, "strict", registry)
        assert strict.full_pairs == []
        assert len(strict.unpaired) == 2
        assert iaa(strict) == 0.0
        flexible = pair_annotations(set_a, set_b, "flexible", registry)
        assert len(flexible.full_pairs) == 1
        assert iaa(flexible) == 1.0

    def test_different_documents_rejected(self, registry):
        set_a = [ann("a1", 0, 5, S)]
        set_b = [ann("b1", 0, 5, S, annotator="ann-b", doc="doc-2")]
        with pytest.raises(AgreementError):
            pair_annotations(set_a, set_b, "strict", registry)

    def test_same_annotator_rejected(self, registry):
        set_a = [ann("a1", 0, 5, S)]
        set_b = [ann("b1", 0, 5, S)]
        with pytest.raises(AgreementError):
            pair_annotations(set_a, set_b, "strict", registry)

    def test_unknown_variant_rejected(self, registry):
        with pytest.raises(AgreementError):
            pair_annotations([], [], "bogus", registry)

    def test_half_pairs_only_in_overlap_variants(self, registry):
        set_a = [ann("a1", 0, 5, S)]
        set_b = [ann("b1", 2, 7, S, annotator="ann-b")]
        for variant in ("strict", "flexible"):
            pairing = pair_annotations(set_a, set_b, variant, registry)
            assert pairing.half_pairs == []
            assert iaa(pairing) == 0.0
        for variant in ("lenient", "relaxed"):
            pairing = pair_annotations(set_a, set_b, variant, registry)
            assert len(pairing.half_pairs) == 1
            assert iaa(pairing) == pytest.approx(0.5)


class TestIaaValues:
    def test_identity_pairing_is_one(self, registry):
        set_a = [ann("a1", 0, 5, S), ann("a2", 8, 12, F)]
        set_b = [ann("b1", 0, 5, S, annotator="ann-b"), ann("b2", 8, 12, F, annotator="ann-b")]
        for variant in VARIANTS:
            assert agreement_value(set_a, set_b, variant, registry) == 1.0

    def test_disjoint_sets_zero(self, registry):
        set_a = [ann("a1", 0, 5, S)]
        set_b = [ann("b1", 20, 25, S, annotator="ann-b")]
        for variant in VARIANTS:
            assert agreement_value(set_a, set_b, variant, registry) == 0.0

    def test_empty_both_sides_null(self, registry):
        for variant in VARIANTS:
            assert agreement_value([], [], variant, registry) is None

    def test_one_empty_side_zero(self, registry):
        set_b = [ann("b1", 0, 5, S, annotator="ann-b")]
        assert agreement_value([], set_b, "strict", registry) == 0.0


class TestOracleAgreement:
    """The engine must agree exactly with the independent brute force."""

    def test_e1_against_oracle(self, registry):
        set_a, set_b = e1_sides()
        for variant in VARIANTS:
            full, half, unpaired, value = oracle_pairing(set_a, set_b, variant, registry)
            pairing = pair_annotations(set_a, set_b, variant, registry)
            assert {(a.id, b.id) for a, b in pairing.full_pairs} == full
            assert {(a.id, b.id) for a, b in pairing.half_pairs} == half
            assert {(x.annotator_id, x.id) for x in pairing.unpaired} == unpaired
            assert iaa(pairing) == pytest.approx(value, abs=1e-15)

    def test_random_instances_match_oracle(self, registry):
        rng = random.Random(20240811)
        for _ in range(150):
            set_a, set_b = random_instance(rng, max_annotations=6)
            for variant in VARIANTS:
                full, half, unpaired, value = oracle_pairing(set_a, set_b, variant, registry)
                pairing = pair_annotations(set_a, set_b, variant, registry)
                assert {(a.id, b.id) for a, b in pairing.full_pairs} == full
                assert {(a.id, b.id) for a, b in pairing.half_pairs} == half
                assert {(x.annotator_id, x.id) for x in pairing.unpaired} == unpaired
                got = iaa(pairing)
                if value is None:
                    assert got is None
                else:
                    assert got == pytest.approx(value, abs=1e-12)

    def test_fast_value_path_matches_full_pairing(self, registry):
        rng = random.Random(7)
        for _ in range(200):
            set_a, set_b = random_instance(rng, max_annotations=6)
            for variant in VARIANTS:
                assert agreement_value(set_a, set_b, variant, registry) == iaa(
                    pair_annotations(set_a, set_b, variant, registry)
                )


class TestInvariants:
    def test_dominance_on_random_instances(self, registry):
        rng = random.Random(99)
        for _ in range(500):
            set_a, set_b = random_instance(rng, max_annotations=6)
            values = all_variant_values(set_a, set_b, registry)
            if values["strict"] is None:
                assert all(v is None for v in values.values())
                continue
            assert values["strict"] <= values["flexible"] + 1e-12
            assert values["strict"] <= values["lenient"] + 1e-12
            assert values["flexible"] <= values["relaxed"] + 1e-12
            assert values["lenient"] <= values["relaxed"] + 1e-12

    def test_swap_symmetry_on_random_instances(self, registry):
        rng = random.Random(1234)
        for _ in range(300):
            set_a, set_b = random_instance(rng, max_annotations=6)
            for variant in VARIANTS:
                forward = pair_annotations(set_a, set_b, variant, registry)
                backward = pair_annotations(set_b, set_a, variant, registry)
                assert iaa(forward) == iaa(backward)
                assert {(a.id, b.id) for a, b in forward.full_pairs} == {
                    (b.id, a.id) for a, b in backward.full_pairs
                }
                assert {(a.id, b.id) for a, b in forward.half_pairs} == {
                    (b.id, a.id) for a, b in backward.half_pairs
                }

    def test_each_annotation_used_once(self, registry):
        rng = random.Random(555)
        for _ in range(200):
            set_a, set_b = random_instance(rng, max_annotations=6)
            pairing = pair_annotations(set_a, set_b, "relaxed", registry)
            seen = []
            for a, b in pairing.full_pairs + pairing.half_pairs:
                seen += [(a.annotator_id, a.id), (b.annotator_id, b.id)]
            seen += [(x.annotator_id, x.id) for x in pairing.unpaired]
            assert len(seen) == len(set(seen)) == len(set_a) + len(set_b)

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_bounds_property(self, seed):
        from dupla.registry import default_registry

        registry = default_registry()
        rng = random.Random(seed)
        set_a, set_b = random_instance(rng, max_annotations=5)
        for variant in VARIANTS:
            value = agreement_value(set_a, set_b, variant, registry)
            if value is not None:
                assert 0.0 <= value <= 1.0


class TestRelationIaa:
    def make_relation(self, id, source, target, rtype, annotator):
        return Relation(
            id=id,
            doc_id="doc-1",
            annotator_id=annotator,
            source_id=source,
            target_id=target,
            rtype=RelationType(rtype),
        )

    def negation_fixture(self, registry):
        # "nega" (Negation cue) pointing at "algia" on both sides.
        set_a = [ann("a1", 9, 13, "Negation"), ann("a2", 14, 19, S)]
        set_b = [
            ann("b1", 9, 13, "Negation", annotator="ann-b"),
            ann("b2", 14, 19, S, annotator="ann-b"),
        ]
        pairing = pair_annotations(set_a, set_b, "strict", registry)
        return set_a, set_b, pairing

    def test_agreed_negation_relation(self, registry):
        _, _, pairing = self.negation_fixture(registry)
        rels_a = [self.make_relation("ra", "a1", "a2", "negation_of", "ann-a")]
        rels_b = [self.make_relation("rb", "b1", "b2", "negation_of", "ann-b")]
        assert relation_iaa(rels_a, rels_b, pairing) == 1.0

    def test_missing_endpoint_excludes_relation(self, registry):
        set_a = [ann("a1", 9, 13, "Negation"), ann("a2", 14, 19, S)]
        set_b = [ann("b1", 9, 13, "Negation", annotator="ann-b")]  # no second concept
        pairing = pair_annotations(set_a, set_b, "strict", registry)
        rels_a = [self.make_relation("ra", "a1", "a2", "negation_of", "ann-a")]
        assert relation_iaa(rels_a, [], pairing) is None

    def test_rtype_disagreement_scores_zero(self, registry):
        _, _, pairing = self.negation_fixture(registry)
        rels_a = [self.make_relation("ra", "a1", "a2", "associated_with", "ann-a")]
        rels_b = [self.make_relation("rb", "b1", "b2", "negation_of", "ann-b")]
        assert relation_iaa(rels_a, rels_b, pairing) == 0.0

    def test_per_rtype_filter(self, registry):
        _, _, pairing = self.negation_fixture(registry)
        rels_a = [self.make_relation("ra", "a1", "a2", "negation_of", "ann-a")]
        rels_b = [self.make_relation("rb", "b1", "b2", "negation_of", "ann-b")]
        assert relation_iaa(rels_a, rels_b, pairing, rtype="negation_of") == 1.0
        assert relation_iaa(rels_a, rels_b, pairing, rtype="associated_with") is None


class TestPerType:
    def test_identical_single_type_sets(self, registry):
        set_a = [ann("a1", 0, 8, "Pharmacologic Substance")]
        set_b = [ann("b1", 0, 8, "Pharmacologic Substance", annotator="ann-b")]
        assert per_type_iaa(set_a, set_b, "Pharmacologic Substance", registry) == 1.0

    def test_absent_type_is_null(self, registry):
        set_a = [ann("a1", 0, 8, S)]
        set_b = [ann("b1", 0, 8, S, annotator="ann-b")]
        assert per_type_iaa(set_a, set_b, "Finding", registry) is None

    def test_restriction_drops_other_types(self, registry):
        set_a = [ann("a1", 0, 5, S), ann("a2", 10, 15, F)]
        set_b = [ann("b1", 0, 5, S, annotator="ann-b"), ann("b2", 10, 15, F, annotator="ann-b")]
        # Restricting to Finding leaves one identical pair on each side.
        assert per_type_iaa(set_a, set_b, "Finding", registry) == 1.0
        assert per_type_iaa(set_a, set_b, S, registry) == 1.0

    def test_unknown_type_rejected(self, registry):
        from dupla.registry import RegistryError

        with pytest.raises(RegistryError):
            per_type_iaa([], [], "Imaginary Type", registry)


class TestLabelsAndSegmentation:
    def test_strength_bands(self):
        assert strength_label(0.708) == "substantial"
        assert strength_label(0.45) == "moderate"
        assert strength_label(0.81) == "almost perfect"
        assert strength_label(0.60) == "moderate"
        assert strength_label(0.40) == "below moderate"

    def test_strength_label_range_check(self):
        with pytest.raises(AgreementError):
            strength_label(1.5)
        with pytest.raises(AgreementError):
            strength_label(-0.1)

    def test_reliability_flag(self):
        assert reliability_flag(0.85) == "good"
        assert reliability_flag(0.8) == "good"
        assert reliability_flag(0.7) == "tolerable"
        assert reliability_flag(0.67) == "low"
        assert reliability_flag(0.3) == "low"

    def test_segment_boundary(self):
        assert segment(0.67) is SegmentLabel.PLATINUM
        assert segment(0.68) is SegmentLabel.GOLD
        assert segment(1.0) is SegmentLabel.GOLD
        assert segment(0.67 + 1e-6) is SegmentLabel.GOLD

    def test_segment_null_rejected(self):
        with pytest.raises(AgreementError):
            segment(None)


class TestAggregate:
    def make_report(self, doc_id, matches, non_matches):
        value = (
            matches / (matches + non_matches) if matches + non_matches > 0 else None
        )
        return DocumentAgreement(
            doc_id=doc_id,
            values={v: value for v in VARIANTS},
            counts={v: (matches, non_matches) for v in VARIANTS},
        )

    def test_equal_size_docs_macro(self):
        result = aggregate([self.make_report("d1", 2, 0), self.make_report("d2", 0, 2)])
        assert result.macro["strict"] == pytest.approx(0.5)

    def test_pooled_micro(self):
        result = aggregate([self.make_report("d1", 1, 0), self.make_report("d2", 1, 3)])
        assert result.macro["strict"] == pytest.approx(0.625)
        assert result.micro["strict"] == pytest.approx(0.4)

    def test_single_doc_macro_equals_micro(self):
        result = aggregate([self.make_report("d1", 3, 1)])
        assert result.macro["strict"] == result.micro["strict"] == pytest.approx(0.75)

    def test_all_null_rejected(self):
        with pytest.raises(AgreementError):
            aggregate([self.make_report("d1", 0, 0)])

    def test_nulls_excluded_from_macro(self):
        result = aggregate([self.make_report("d1", 1, 1), self.make_report("d2", 0, 0)])
        assert result.macro["strict"] == pytest.approx(0.5)
        assert isinstance(result, CorpusAgreement)


class TestDocumentReport:
    def test_full_report_shape(self, registry):
        set_a, set_b = e1_sides()
        report = compute_document_agreement(
            "doc-1", set_a, set_b, [], [], registry, per_type=True
        )
        assert report.values["strict"] == pytest.approx(1 / 3)
        assert report.values["lenient"] == pytest.approx(0.75)
        assert report.labels["lenient"] == "substantial"
        assert report.relations is None
        assert set(report.per_type) == {"T184", "T033"}
