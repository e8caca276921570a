"""Annotation assistant: type suggestions for a selected span.

Suggestions come from two places, in priority order: (a) what this project
has already annotated for the same surface form, and (b) a terminology
provider queried by exact match and by small edit distances. The assistant
never writes annotations and never pre-annotates a document; it only ranks
candidates for the annotator to accept or ignore.
"""

from __future__ import annotations

import enum
import logging
import threading
import urllib.parse
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence

import httpx

from . import _kernels
from .model import Annotation, Document, Span
from .registry import Registry

logger = logging.getLogger(__name__)

# Terms at most this long tolerate one edit; longer terms tolerate two.
# Short clinical abbreviations are dangerously ambiguous, so they get the
# tighter bound.
FUZZY_SHORT_LENGTH = 6
FUZZY_SHORT_BOUND = 1
FUZZY_LONG_BOUND = 2

MAX_SELECTION_TOKENS = 6


class SuggestError(Exception):
    """Raised when a suggestion request violates its contract."""


class ProviderUnavailable(Exception):
    """Raised by terminology providers when the backing service is down."""


def normalize_term(text: str) -> str:
    """Case-fold and collapse whitespace; clinical text is often all-caps."""
    return " ".join(text.split()).casefold()


def fuzzy_bound(term: str) -> int:
    return FUZZY_SHORT_BOUND if len(term) <= FUZZY_SHORT_LENGTH else FUZZY_LONG_BOUND


class SuggestionSource(str, enum.Enum):
    HISTORY = "history"
    TERMINOLOGY_EXACT = "terminology_exact"
    TERMINOLOGY_FUZZY = "terminology_fuzzy"


_SOURCE_RANK = {
    SuggestionSource.HISTORY: 0,
    SuggestionSource.TERMINOLOGY_EXACT: 1,
    SuggestionSource.TERMINOLOGY_FUZZY: 2,
}


@dataclass(frozen=True)
class Suggestion:
    span: Span
    types: frozenset[str]
    source: SuggestionSource
    score: float
    term: str

    def sort_key(self):
        return (
            _SOURCE_RANK[self.source],
            -self.score,
            min(self.types),
            self.term,
            tuple(sorted(self.types)),
        )


@dataclass
class SuggestionResponse:
    suggestions: list[Suggestion]
    provider_unavailable: bool = False


@dataclass(frozen=True)
class TerminologyEntry:
    term: str
    types: frozenset[str]

    def __post_init__(self):
        if not self.term:
            raise SuggestError("terminology terms must be non-empty")
        if not self.types:
            raise SuggestError(f"terminology term {self.term!r} has no types")


class TerminologyProvider(Protocol):
    def candidates(self, query: str) -> Sequence[TerminologyEntry]:
        """Entries that may match the normalized query exactly or fuzzily."""


class FileTerminology:
    """Local TSV-backed terminology: term<TAB>sty_code[,sty_code...]."""

    def __init__(self, path: str | Path, registry: Registry):
        self._by_term: dict[str, frozenset[str]] = {}
        path = Path(path)
        for lineno, raw in enumerate(path.read_text("utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise SuggestError(f"{path}:{lineno}: expected 2 tab-separated columns")
            term = normalize_term(fields[0])
            if not term:
                raise SuggestError(f"{path}:{lineno}: empty term")
            codes = frozenset(
                registry.resolve(code.strip()).code
                for code in fields[1].split(",")
                if code.strip()
            )
            if not codes:
                raise SuggestError(f"{path}:{lineno}: term {term!r} has no types")
            self._by_term[term] = self._by_term.get(term, frozenset()) | codes
        self._terms = sorted(self._by_term)

    def __len__(self) -> int:
        return len(self._by_term)

    def candidates(self, query: str) -> list[TerminologyEntry]:
        # The scan bound is the widest we allow; per-term bounds are
        # re-checked by the caller.
        hits = _kernels.scan(
            query, self._terms, FUZZY_SHORT_LENGTH, FUZZY_SHORT_BOUND, FUZZY_LONG_BOUND
        )
        return [
            TerminologyEntry(self._terms[i], self._by_term[self._terms[i]])
            for i, _ in hits
        ]


class HttpTerminology:
    """Remote lookup service: GET <base>/lookup?term=... -> [{term, types}]."""

    def __init__(self, base_url: str, timeout: float = 3.0):
        self._base = base_url.rstrip("/")
        self._timeout = timeout

    def candidates(self, query: str) -> list[TerminologyEntry]:
        url = f"{self._base}/lookup?term={urllib.parse.quote(query)}"
        try:
            response = httpx.get(url, timeout=self._timeout)
            response.raise_for_status()
            payload = response.json()
        except Exception as exc:
            raise ProviderUnavailable(str(exc)) from exc
        entries = []
        for item in payload:
            entries.append(
                TerminologyEntry(
                    normalize_term(item["term"]), frozenset(item["types"])
                )
            )
        return entries


class AnnotationHistory:
    """Frequency index over previously accepted (surface, types) pairs.

    Reads are lock-free; writes are serialized. Entries remember the round
    they were made in so suggestions can ignore history predating the
    current guideline revision (``stale_after_round``).
    """

    def __init__(self):
        self._counts: dict[tuple[str, frozenset[str]], dict[int, int]] = {}
        self._lock = threading.Lock()

    def record_acceptance(self, document: Document, annotation: Annotation) -> None:
        surface = normalize_term(document.surface(annotation.span))
        if not surface:
            return
        key = (surface, annotation.types)
        with self._lock:
            rounds = self._counts.setdefault(key, {})
            rounds[annotation.created_round] = rounds.get(annotation.created_round, 0) + 1

    def lookup(
        self, surface: str, stale_after_round: Optional[int] = None
    ) -> list[tuple[frozenset[str], int]]:
        out = []
        for (term, types), rounds in self._counts.items():
            if term != surface:
                continue
            count = sum(
                n
                for made_in, n in rounds.items()
                if stale_after_round is None or made_in >= stale_after_round
            )
            if count > 0:
                out.append((types, count))
        return out


def suggest(
    text: str,
    cursor_span: Span,
    history: AnnotationHistory,
    terminology: Optional[TerminologyProvider],
    *,
    stale_after_round: Optional[int] = None,
) -> SuggestionResponse:
    """Rank annotation suggestions for the selected span.

    Returns an empty list when nothing matches; a dead terminology provider
    degrades the response to history-only and flags it.
    """
    if cursor_span.end > len(text):
        raise SuggestError("selection is out of bounds")
    selection = text[cursor_span.start : cursor_span.end]
    tokens = selection.split()
    if not 1 <= len(tokens) <= MAX_SELECTION_TOKENS:
        raise SuggestError(
            f"selection must cover 1-{MAX_SELECTION_TOKENS} tokens, got {len(tokens)}"
        )
    query = normalize_term(selection)

    suggestions: list[Suggestion] = []
    for types, count in history.lookup(query, stale_after_round):
        suggestions.append(
            Suggestion(
                span=cursor_span,
                types=types,
                source=SuggestionSource.HISTORY,
                score=float(count),
                term=query,
            )
        )

    provider_unavailable = False
    if terminology is not None:
        try:
            entries = terminology.candidates(query)
        except ProviderUnavailable as exc:
            logger.warning("terminology provider unavailable: %s", exc)
            entries = []
            provider_unavailable = True
        for entry in entries:
            distance = _kernels.bounded_levenshtein(
                query, entry.term, fuzzy_bound(entry.term)
            )
            if distance == 0:
                source = SuggestionSource.TERMINOLOGY_EXACT
            elif distance <= fuzzy_bound(entry.term):
                source = SuggestionSource.TERMINOLOGY_FUZZY
            else:
                continue
            suggestions.append(
                Suggestion(
                    span=cursor_span,
                    types=entry.types,
                    source=source,
                    score=1.0 / (1.0 + distance),
                    term=entry.term,
                )
            )

    suggestions.sort(key=Suggestion.sort_key)
    return SuggestionResponse(suggestions=suggestions, provider_unavailable=provider_unavailable)
