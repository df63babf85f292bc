"""Weight tables and the categorical distributions built from them.

A weight table is a header-less CSV file: every line holds a category and an
integer population count, e.g. ``Single,282106``.  Counts stay integers all
the way through; probabilities are exact ratios of integers.
"""

from __future__ import annotations

import bisect
import csv
import io
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Union

from synthcensus.errors import (
    AgeOutOfRange,
    AllWeightsZero,
    BadFileNamePattern,
    DuplicateCategory,
    EmptyTable,
    MissingGroupFile,
    NegativeWeight,
    NonIntegerWeight,
    WeightTableError,
)

__all__ = [
    "WeightTable",
    "CategoricalDistribution",
    "AgeBucket",
    "AGE_BUCKETS",
    "GENDER_TOKENS",
    "GroupedDistributionSet",
    "parse_weight_table",
    "read_weight_table",
    "build_distribution",
    "load_grouped",
    "age_bucket",
    "gender_token",
]

_WEIGHT = re.compile(r"[+-]?[0-9]+")


class EmptyCategory(WeightTableError):
    pass


class MalformedCsv(WeightTableError):
    pass


@dataclass(frozen=True)
class WeightTable:
    entries: tuple[tuple[str, int], ...]

    @property
    def total_weight(self) -> int:
        return sum(w for _, w in self.entries)

    @property
    def categories(self) -> list[str]:
        return [c for c, _ in self.entries]


def parse_weight_table(text: str, source: str | None = None) -> WeightTable:
    """Parse weight-table CSV text.

    Every non-blank line contributes one entry: all fields but the last form
    the category (so ``Agriculture, forestry and fishing (A),12`` works with or
    without quoting), the last field is the weight.
    """
    if text.startswith("﻿"):
        text = text[1:]
    entries: list[tuple[str, int]] = []
    seen: dict[str, int] = {}
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        for row in reader:
            line = reader.line_num
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) < 2:
                raise NonIntegerWeight(f"no weight field in {row[0]!r}", source=source, line=line)
            category = ",".join(row[:-1]).strip()
            raw = row[-1].strip()
            if not category:
                raise EmptyCategory("empty category name", source=source, line=line)
            if not _WEIGHT.fullmatch(raw):
                raise NonIntegerWeight(f"weight {raw!r} is not an integer", source=source, line=line)
            weight = int(raw)
            if weight < 0:
                raise NegativeWeight(f"weight {weight} is negative", source=source, line=line)
            if category in seen:
                raise DuplicateCategory(
                    f"category {category!r} already defined on line {seen[category]}",
                    source=source,
                    line=line,
                )
            seen[category] = line
            entries.append((category, weight))
    except csv.Error as exc:
        raise MalformedCsv(str(exc), source=source, line=reader.line_num) from None
    if not entries:
        raise EmptyTable("table has no entries", source=source)
    if not any(w for _, w in entries):
        raise AllWeightsZero("every weight is zero", source=source)
    return WeightTable(tuple(entries))


def read_weight_table(path: Union[str, Path]) -> WeightTable:
    path = Path(path)
    return parse_weight_table(path.read_text(encoding="utf-8"), source=path.name)


@dataclass(frozen=True)
class CategoricalDistribution:
    """Categories with positive weight plus their running totals.

    ``all_categories`` keeps source order including zero-weight entries so
    reports can list them as expected-zero.
    """

    categories: tuple[str, ...]
    weights: tuple[int, ...]
    cumulative: tuple[int, ...]
    all_categories: tuple[str, ...]
    _index: dict = field(default=None, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.categories)})

    @property
    def total_weight(self) -> int:
        return self.cumulative[-1]

    @property
    def dropped(self) -> tuple[str, ...]:
        return tuple(c for c in self.all_categories if c not in self._index)

    def weight(self, category: str) -> int:
        i = self._index.get(category)
        return 0 if i is None else self.weights[i]

    def probability(self, category: str) -> Fraction:
        return Fraction(self.weight(category), self.total_weight)

    def probabilities(self) -> dict[str, Fraction]:
        """Exact probability of every category in source order, zeros included."""
        return {c: self.probability(c) for c in self.all_categories}

    def locate(self, r: int) -> str:
        """Category whose cumulative range contains ``r`` (``0 <= r < total``)."""
        return self.categories[bisect.bisect_right(self.cumulative, r)]

    def __contains__(self, category: object) -> bool:
        return category in self._index

    def __len__(self) -> int:
        return len(self.categories)


def build_distribution(table: WeightTable) -> CategoricalDistribution:
    categories, weights, cumulative = [], [], []
    running = 0
    for category, weight in table.entries:
        if weight == 0:
            continue
        running += weight
        categories.append(category)
        weights.append(weight)
        cumulative.append(running)
    if not categories:
        raise AllWeightsZero("every weight is zero")
    return CategoricalDistribution(
        categories=tuple(categories),
        weights=tuple(weights),
        cumulative=tuple(cumulative),
        all_categories=tuple(table.categories),
    )


@dataclass(frozen=True, order=True)
class AgeBucket:
    low: int
    high: int

    def __post_init__(self) -> None:
        if self.low % 5 or self.high != self.low + 4 or not 15 <= self.low <= 80:
            raise AgeOutOfRange(f"{self.low}-{self.high} is not a valid 5-year age band")

    @property
    def label(self) -> str:
        return f"{self.low}-{self.high}"

    def __str__(self) -> str:
        return self.label

    @classmethod
    def parse(cls, label: str) -> "AgeBucket":
        low, _, high = label.partition("-")
        return cls(int(low), int(high))


AGE_BUCKETS: tuple[AgeBucket, ...] = tuple(AgeBucket(lo, lo + 4) for lo in range(15, 85, 5))
MIN_AGE, MAX_AGE = 17, 84
GENDER_TOKENS = ("Female", "Male")


def age_bucket(age: int) -> AgeBucket:
    if isinstance(age, bool) or not isinstance(age, int):
        raise AgeOutOfRange(f"age must be an integer, got {age!r}")
    if not 15 <= age <= 84:
        raise AgeOutOfRange(f"age {age} lies outside 15-84")
    low = age - age % 5
    return AgeBucket(low, low + 4)


def gender_token(gender: str) -> str:
    """File-name token for a gender value: ``female`` -> ``Female``."""
    return gender.strip().capitalize()


GroupKey = Union[AgeBucket, tuple[str, AgeBucket]]

AGE_KEYED = "age_bucket"
AGE_GENDER_KEYED = "age_bucket_and_gender"


@dataclass(frozen=True)
class GroupedDistributionSet:
    attribute: str
    group_key_kind: str
    groups: dict

    def get(self, bucket: AgeBucket, gender: str | None = None) -> CategoricalDistribution:
        if self.group_key_kind == AGE_KEYED:
            return self.groups[bucket]
        return self.groups[(gender_token(gender or ""), bucket)]

    def items(self) -> Iterator[tuple[GroupKey, CategoricalDistribution]]:
        return iter(self.groups.items())

    def __len__(self) -> int:
        return len(self.groups)


def group_label(key: GroupKey) -> str:
    if isinstance(key, AgeBucket):
        return key.label
    gender, bucket = key
    return f"{bucket.label}/{gender.lower()}"


def _bucket_from_name(name: str, low: str, high: str) -> AgeBucket:
    try:
        return AgeBucket(int(low), int(high))
    except AgeOutOfRange:
        raise BadFileNamePattern(f"{name}: {low}-{high} is not one of the 5-year bands 15-19 ... 80-84") from None


def load_grouped(directory: Union[str, Path], attr: str, kind: str = AGE_KEYED) -> GroupedDistributionSet:
    """Load one distribution per age bucket (and gender) for ``attr``.

    Files are named ``<Attr>Qty<low>-<high>.csv`` when keyed by age bucket and
    ``<Attr>Qty_<Gender>_<low>-<high>.csv`` when keyed by age bucket and gender.
    """
    directory = Path(directory)
    if kind not in (AGE_KEYED, AGE_GENDER_KEYED):
        raise ValueError(f"unknown group key kind {kind!r}")
    if kind == AGE_KEYED:
        pattern = re.compile(rf"{re.escape(attr)}Qty(\d+)-(\d+)\.csv")
    else:
        pattern = re.compile(rf"{re.escape(attr)}Qty_([A-Za-z]+)_(\d+)-(\d+)\.csv")
    prefix = f"{attr}Qty"
    groups: dict = {}
    for path in sorted(directory.iterdir()):
        name = path.name
        if not (name.startswith(prefix) and name.endswith(".csv")):
            continue
        m = pattern.fullmatch(name)
        if not m:
            raise BadFileNamePattern(f"{name} does not match the {kind} naming pattern for {attr}")
        if kind == AGE_KEYED:
            key: GroupKey = _bucket_from_name(name, *m.groups())
        else:
            gender, low, high = m.groups()
            if gender not in GENDER_TOKENS:
                raise BadFileNamePattern(f"{name}: gender token must be one of {GENDER_TOKENS}")
            key = (gender, _bucket_from_name(name, low, high))
        groups[key] = build_distribution(read_weight_table(path))

    if kind == AGE_KEYED:
        expected: list[GroupKey] = list(AGE_BUCKETS)
    else:
        expected = [(g, b) for g in GENDER_TOKENS for b in AGE_BUCKETS]
    for key in expected:
        if key not in groups:
            if isinstance(key, AgeBucket):
                raise MissingGroupFile(f"{attr}: no weight file for age group {key.label} ({prefix}{key.label}.csv)")
            gender, bucket = key
            raise MissingGroupFile(
                f"{attr}: no weight file for {gender} {bucket.label} ({prefix}_{gender}_{bucket.label}.csv)"
            )
    return GroupedDistributionSet(attr, kind, {k: groups[k] for k in expected})
