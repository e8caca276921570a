"""Shared fixtures: registries, annotation builders, random instance generator."""

import random

import pytest

from dupla.model import Annotation, Span
from dupla.registry import default_registry

_REGISTRY = default_registry()


@pytest.fixture(scope="session")
def registry():
    return _REGISTRY


def ann(id, start, end, types, annotator="ann-a", doc="doc-1", expansion=None):
    """Terse annotation builder; types may be codes or display names."""
    if isinstance(types, str):
        types = [types]
    return Annotation(
        id=id,
        doc_id=doc,
        annotator_id=annotator,
        span=Span(start, end),
        types=_REGISTRY.resolve_codes(types),
        expansion=expansion,
    )


# Compact code pool for random instances: a few types per group plus the two
# workbench extras, so both type-level and group-level collisions occur often.
RANDOM_TYPE_POOL = [
    "T184",  # Sign or Symptom        (Disorders)
    "T033",  # Finding                (Disorders)
    "T047",  # Disease or Syndrome    (Disorders)
    "T121",  # Pharmacologic Substance (Chemicals & Drugs)
    "T109",  # Organic Chemical       (Chemicals & Drugs)
    "T023",  # Body Part, Organ, or Organ Component (Anatomy)
    "T029",  # Body Location or Region (Anatomy)
    "T060",  # Diagnostic Procedure   (Procedures)
    "T061",  # Therapeutic or Preventive Procedure (Procedures)
    "T074",  # Medical Device         (Devices)
    "NEG",
    "ABBR",
]


def random_side(rng: random.Random, annotator: str, max_annotations: int = 8):
    """Random annotation set over a small span universe (collisions likely)."""
    count = rng.randint(0, max_annotations)
    annotations = []
    for i in range(count):
        start = rng.randrange(0, 30)
        end = start + rng.randint(1, 8)
        n_types = rng.choice((1, 1, 1, 2))
        types = frozenset(rng.sample(RANDOM_TYPE_POOL, n_types))
        annotations.append(
            Annotation(
                id=f"{annotator}-{i}",
                doc_id="doc-1",
                annotator_id=annotator,
                span=Span(start, end),
                types=types,
            )
        )
    return annotations


def random_instance(rng: random.Random, max_annotations: int = 8):
    return (
        random_side(rng, "ann-a", max_annotations),
        random_side(rng, "ann-b", max_annotations),
    )
