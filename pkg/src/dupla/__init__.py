"""dupla: double-annotation workbench for clinical narratives.

Pipeline: import source records, review/redact PHI, assign random annotator
pairs, annotate with assistant suggestions, score inter-annotator agreement
in four variants, adjudicate divergences, and export the gold standard.
"""

__version__ = "0.1.0"

from .agreement import (
    SegmentLabel,
    aggregate,
    agreement_value,
    compute_document_agreement,
    iaa,
    pair_annotations,
    per_type_iaa,
    relation_iaa,
    segment,
    strength_label,
)
from .model import Actor, Annotation, Document, Relation, Span
from .registry import Registry, default_registry, load_registry

__all__ = [
    "Actor",
    "Annotation",
    "Document",
    "Registry",
    "Relation",
    "SegmentLabel",
    "Span",
    "__version__",
    "aggregate",
    "agreement_value",
    "compute_document_agreement",
    "default_registry",
    "iaa",
    "load_registry",
    "pair_annotations",
    "per_type_iaa",
    "relation_iaa",
    "segment",
    "strength_label",
]
