"""Attribute-domain catalog, relation vectorization, and the holder-count
ground truth (card_k) used by tests and the attack analyses.

All parties must agree on the same ordering of the attribute domain; the
canonical order is byte-wise lexicographic on the canonical string form
(integers written without leading zeros).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DataError, DomainError, ParameterError


def canonical_value(item: object) -> str:
    """Canonical string form of an attribute value."""
    if isinstance(item, bool):
        raise ParameterError("boolean attribute values are not supported")
    if isinstance(item, int):
        return str(item)  # no leading zeros by construction
    return str(item)


@dataclass(frozen=True)
class DomainCatalog:
    """The ordered attribute domain A_c and its inverse index."""

    values: tuple[str, ...]
    index: dict[str, int] = field(compare=False)

    @property
    def n(self) -> int:
        return len(self.values)

    @classmethod
    def from_values(cls, items: Iterable[object]) -> "DomainCatalog":
        canon = sorted({canonical_value(x) for x in items})
        return cls(values=tuple(canon), index={v: i for i, v in enumerate(canon)})

    def position(self, item: object) -> int:
        key = canonical_value(item)
        try:
            return self.index[key]
        except KeyError:
            raise DomainError(f"item {key!r} is not in the attribute domain") from None


@dataclass(frozen=True)
class Relation:
    """One client's multiset of attribute values."""

    owner_id: int
    items: tuple[str, ...]

    @classmethod
    def from_items(cls, owner_id: int, items: Iterable[object]) -> "Relation":
        return cls(owner_id=owner_id, items=tuple(canonical_value(x) for x in items))


def vectorize(relation: Relation, catalog: DomainCatalog) -> tuple[int, ...]:
    """Boolean presence vector over catalog positions; duplicates collapse."""
    v = [0] * catalog.n
    for item in relation.items:
        v[catalog.position(item)] = 1
    return tuple(v)


def card_k(relations: Sequence[Relation], catalog: DomainCatalog, k: int) -> set[int]:
    """Positions whose value is held by exactly k of the m clients."""
    m = len(relations)
    if not 0 <= k <= m:
        raise ParameterError(f"k = {k} out of range [0, {m}]")
    counts = holder_counts(relations, catalog)
    return {i for i, c in enumerate(counts) if c == k}


def holder_counts(relations: Sequence[Relation], catalog: DomainCatalog) -> list[int]:
    """Per-position count of clients holding that value (presence, not multiplicity)."""
    counts = [0] * catalog.n
    for rel in relations:
        for i, bit in enumerate(vectorize(rel, catalog)):
            counts[i] += bit
    return counts


def true_intersection(relations: Sequence[Relation], catalog: DomainCatalog) -> set[int]:
    """Brute-force PSI oracle: positions held by all m clients (card_m)."""
    if not relations:
        raise ParameterError("need at least one relation")
    return card_k(relations, catalog, len(relations))


def load_domain_file(path: str) -> DomainCatalog:
    """Domain file: one canonical value per line, UTF-8, already sorted."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [line.rstrip("\n") for line in fh if line.strip() != ""]
    except OSError as exc:
        raise DataError(f"cannot read domain file {path}: {exc}") from exc
    for i in range(1, len(lines)):
        if lines[i - 1] >= lines[i]:
            raise DataError(
                f"{path}: line {i + 1}: domain values must be strictly sorted "
                f"({lines[i - 1]!r} >= {lines[i]!r})"
            )
    return DomainCatalog(values=tuple(lines), index={v: i for i, v in enumerate(lines)})


def load_relation_csv(path: str, owner_id: int) -> Relation:
    """Relation file: single-column CSV with header `value`."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty relation file") from None
            if header != ["value"]:
                raise DataError(f"{path}: expected header 'value', got {header}")
            items = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 1:
                    raise DataError(f"{path}: line {lineno}: expected a single column")
                items.append(row[0])
    except OSError as exc:
        raise DataError(f"cannot read relation file {path}: {exc}") from exc
    return Relation(owner_id=owner_id, items=tuple(items))
