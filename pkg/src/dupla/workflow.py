"""Project workflow: random double-annotator assignment and round tracking.

Assignment is seeded so a batch can be reproduced exactly, balances load so
per-annotator (and per-adjudicator) document counts never differ by more
than one, and never lets an actor adjudicate a document they annotate.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from statistics import fmean
from typing import Optional, Sequence

from .model import Actor, Document, DocumentStatus, Role


class WorkflowError(Exception):
    """Raised for invalid assignment batches or round queries."""


@dataclass(frozen=True)
class Assignment:
    doc_id: str
    annotator_a: str
    annotator_b: str
    adjudicator: str
    round: int

    def __post_init__(self):
        if self.annotator_a == self.annotator_b:
            raise WorkflowError(f"{self.doc_id}: annotators must differ")
        if self.adjudicator in (self.annotator_a, self.annotator_b):
            raise WorkflowError(f"{self.doc_id}: adjudicator cannot annotate the same document")

    @property
    def pair(self) -> frozenset[str]:
        return frozenset((self.annotator_a, self.annotator_b))


def assign(
    documents: Sequence[Document],
    annotators: Sequence[Actor],
    adjudicators: Sequence[Actor],
    seed: int,
    round: int = 1,
) -> list[Assignment]:
    """Randomly pair two annotators and one adjudicator per document."""
    if len({a.id for a in annotators}) < 2:
        raise WorkflowError("at least two annotators are required")
    if not adjudicators:
        raise WorkflowError("at least one adjudicator is required")
    for actor in annotators:
        if actor.role is not Role.ANNOTATOR:
            raise WorkflowError(f"actor {actor.id} does not have the annotator role")
    for actor in adjudicators:
        if actor.role is not Role.ADJUDICATOR:
            raise WorkflowError(f"actor {actor.id} does not have the adjudicator role")
    for doc in documents:
        if doc.status is not DocumentStatus.REVIEWED:
            raise WorkflowError(f"document {doc.id} is not reviewed yet")

    rng = random.Random(seed)
    annotator_ids = sorted({a.id for a in annotators})
    adjudicator_ids = sorted({a.id for a in adjudicators})
    ann_load = {a: 0 for a in annotator_ids}
    adj_load = {a: 0 for a in adjudicator_ids}

    assignments = []
    for doc in documents:
        # Least-loaded pair with a random tie-break keeps loads within 1
        # while the actual pairing stays seed-dependent.
        ranked = sorted(annotator_ids, key=lambda a: (ann_load[a], rng.random()))
        first, second = ranked[0], ranked[1]
        adjudicator = min(adjudicator_ids, key=lambda a: (adj_load[a], rng.random()))
        ann_load[first] += 1
        ann_load[second] += 1
        adj_load[adjudicator] += 1
        annotator_a, annotator_b = sorted((first, second))
        assignments.append(
            Assignment(
                doc_id=doc.id,
                annotator_a=annotator_a,
                annotator_b=annotator_b,
                adjudicator=adjudicator,
                round=round,
            )
        )
        doc.advance_status(DocumentStatus.ASSIGNED)
    return assignments


@dataclass
class RoundReport:
    """Per-round agreement snapshot used by the guideline-revision loop."""

    round: int
    doc_ids: list[str]
    mean_iaa: float
    per_pair: dict[frozenset, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.doc_ids:
            raise WorkflowError("a round report needs at least one document")
        if not 0.0 <= self.mean_iaa <= 1.0:
            raise WorkflowError(f"mean agreement out of range: {self.mean_iaa}")


def build_round_report(
    round: int, doc_values: dict[str, float], pairs: Optional[dict[str, frozenset]] = None
) -> RoundReport:
    """Summarize one round from per-document agreement values."""
    defined = {doc: v for doc, v in doc_values.items() if v is not None}
    if not defined:
        raise WorkflowError(f"round {round} has no scored documents")
    per_pair: dict[frozenset, float] = {}
    if pairs:
        grouped: dict[frozenset, list[float]] = {}
        for doc, value in defined.items():
            pair = pairs.get(doc)
            if pair is not None:
                grouped.setdefault(pair, []).append(value)
        per_pair = {pair: fmean(values) for pair, values in grouped.items()}
    return RoundReport(
        round=round,
        doc_ids=sorted(defined),
        mean_iaa=fmean(defined.values()),
        per_pair=per_pair,
    )


class Stability(str, enum.Enum):
    STABLE = "stable"
    CONTINUE = "continue"


def check_stability(
    rounds: Sequence[RoundReport | float], epsilon: float = 0.02
) -> Stability:
    """Guideline-loop stopping rule: stable once the last three round means
    pairwise differ by at most epsilon."""
    if epsilon < 0:
        raise WorkflowError("epsilon must be >= 0")
    means = [r.mean_iaa if isinstance(r, RoundReport) else float(r) for r in rounds]
    if len(means) < 3:
        return Stability.CONTINUE
    window = means[-3:]
    # Tiny slack absorbs binary-representation noise at the exact boundary.
    if max(window) - min(window) <= epsilon + 1e-12:
        return Stability.STABLE
    return Stability.CONTINUE
