"""Semantic-type registry: fine-grained types and their coarse groups.

Every annotatable type lives here. The registry is loaded once from a TSV
table and is immutable afterwards, so it can be shared freely between
threads and request handlers.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

# Names of the two workbench-specific types. Their codes are whatever the
# registry file assigns, but the names are fixed by contract.
ABBREVIATION_NAME = "Abbreviation"
NEGATION_NAME = "Negation"

# Reserved group for the two types above.
NA_GROUP_CODE = "NA"
NA_GROUP_NAME = "N/A"

_DEFAULT_ABBREVIATION_CODE = "ABBR"
_DEFAULT_NEGATION_CODE = "NEG"


class RegistryError(Exception):
    """Raised when a semantic-type table cannot be loaded or queried."""


@dataclass(frozen=True)
class SemanticGroup:
    code: str
    name: str


@dataclass(frozen=True)
class SemanticType:
    code: str
    name: str
    group: SemanticGroup


class Registry:
    """Immutable lookup table mapping semantic types to their groups."""

    def __init__(self, types: Iterable[SemanticType]):
        self._by_code: dict[str, SemanticType] = {}
        self._by_name: dict[str, SemanticType] = {}
        for sty in types:
            if sty.code in self._by_code:
                raise RegistryError(f"duplicate semantic type code: {sty.code}")
            if sty.name in self._by_name:
                raise RegistryError(f"duplicate semantic type name: {sty.name}")
            self._by_code[sty.code] = sty
            self._by_name[sty.name] = sty
        if not self._by_code:
            raise RegistryError("no semantic types")
        for required in (ABBREVIATION_NAME, NEGATION_NAME):
            sty = self._by_name.get(required)
            if sty is None:
                raise RegistryError(f"registry is missing the {required!r} type")
            if sty.group.name != NA_GROUP_NAME:
                raise RegistryError(
                    f"{required!r} must map to the {NA_GROUP_NAME!r} group, got {sty.group.name!r}"
                )

    def __len__(self) -> int:
        return len(self._by_code)

    def __iter__(self) -> Iterator[SemanticType]:
        return iter(self._by_code.values())

    def __contains__(self, code_or_name: str) -> bool:
        return code_or_name in self._by_code or code_or_name in self._by_name

    @property
    def abbreviation(self) -> SemanticType:
        return self._by_name[ABBREVIATION_NAME]

    @property
    def negation(self) -> SemanticType:
        return self._by_name[NEGATION_NAME]

    @property
    def groups(self) -> list[SemanticGroup]:
        seen: dict[str, SemanticGroup] = {}
        for sty in self._by_code.values():
            seen.setdefault(sty.group.code, sty.group)
        return sorted(seen.values(), key=lambda g: g.code)

    def resolve(self, code_or_name: str) -> SemanticType:
        """Look up a type by its code or, failing that, by its display name."""
        sty = self._by_code.get(code_or_name) or self._by_name.get(code_or_name)
        if sty is None:
            raise RegistryError(f"unknown semantic type: {code_or_name!r}")
        return sty

    def group_of(self, code_or_name: str) -> SemanticGroup:
        return self.resolve(code_or_name).group

    def resolve_codes(self, values: Iterable[str]) -> frozenset[str]:
        """Normalize a mix of codes and names to a canonical code set."""
        return frozenset(self.resolve(v).code for v in values)


def load_registry(path: str | Path) -> Registry:
    """Load a registry from a tab-separated table.

    Expected columns: sty_code, sty_name, sgr_code, sgr_name. Lines starting
    with ``#`` and blank lines are ignored. The two workbench types
    (Abbreviation, Negation) are appended with the reserved N/A group when
    the file does not list them itself.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise RegistryError(f"cannot read registry file {path}: {exc}") from exc
    return _parse_registry(lines, source=str(path))


def default_registry() -> Registry:
    """The semantic-type table shipped with the package."""
    text = resources.files("dupla").joinpath("data/semantic_types.tsv").read_text("utf-8")
    return _parse_registry(text.splitlines(), source="<builtin>")


def _parse_registry(lines: Iterable[str], source: str) -> Registry:
    groups: dict[str, SemanticGroup] = {}
    types: list[SemanticType] = []
    seen_codes: set[str] = set()
    names: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise RegistryError(f"{source}:{lineno}: expected 4 tab-separated columns, got {len(fields)}")
        sty_code, sty_name, sgr_code, sgr_name = (f.strip() for f in fields)
        if not sty_code or not sty_name:
            raise RegistryError(f"{source}:{lineno}: empty semantic type code or name")
        if not sgr_code or not sgr_name:
            raise RegistryError(f"{source}:{lineno}: semantic type {sty_code} has no group")
        if sty_code in seen_codes:
            raise RegistryError(f"{source}:{lineno}: duplicate semantic type code: {sty_code}")
        seen_codes.add(sty_code)
        names.add(sty_name)
        group = groups.setdefault(sgr_code, SemanticGroup(sgr_code, sgr_name))
        if group.name != sgr_name:
            raise RegistryError(
                f"{source}:{lineno}: group {sgr_code} renamed from {group.name!r} to {sgr_name!r}"
            )
        types.append(SemanticType(sty_code, sty_name, group))
    if not types:
        raise RegistryError("no semantic types")

    na_group = groups.setdefault(NA_GROUP_CODE, SemanticGroup(NA_GROUP_CODE, NA_GROUP_NAME))
    if ABBREVIATION_NAME not in names:
        types.append(SemanticType(_DEFAULT_ABBREVIATION_CODE, ABBREVIATION_NAME, na_group))
    if NEGATION_NAME not in names:
        types.append(SemanticType(_DEFAULT_NEGATION_CODE, NEGATION_NAME, na_group))
    return Registry(types)
