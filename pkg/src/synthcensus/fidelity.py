"""Numeric comparison between a generated dataset and its target weights.

Two metrics per attribute (and per age group for conditional attributes):
total variation distance, which decides pass/fail, and the Pearson
chi-square statistic with its degrees of freedom, reported for reference.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence, Union

from synthcensus.errors import (
    AgeOutOfRange,
    EmptyHistogram,
    InsufficientCells,
    IoFailure,
    UnknownColumn,
    UnparsableAge,
)
from synthcensus.fixtures import Fixtures
from synthcensus.weights import (
    AGE_GENDER_KEYED,
    AgeBucket,
    CategoricalDistribution,
    age_bucket,
)

TV_TOLERANCE = 0.02
TV_TOLERANCE_GROUPED = 0.05
MIN_EVALUATED_N = 500
MIN_EXPECTED = 5

AGE_BUCKETING = "age_bucket"
IDENTITY = "identity"


@dataclass
class Histogram:
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    def frequency(self, category: str) -> Fraction:
        return Fraction(self.counts.get(category, 0), self.n)


@dataclass(frozen=True)
class GroupBy:
    column: str
    bucketing: str = IDENTITY


@dataclass
class Dataset:
    path: Path
    header: list[str]
    rows: list[list[str]]

    def column_index(self, name: str) -> int:
        if name in self.header:
            return self.header.index(name)
        folded = [h.strip().casefold() for h in self.header]
        key = name.strip().casefold()
        if folded.count(key) == 1:
            return folded.index(key)
        raise UnknownColumn(f"{self.path.name} has no column {name!r} (columns: {', '.join(self.header)})")


def read_dataset(path: Union[str, Path]) -> Dataset:
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [row for row in reader if row]
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from None
    if header is None:
        raise EmptyHistogram(f"{path.name} is empty")
    width = len(header)
    for i, row in enumerate(rows, 2):
        if len(row) != width:
            raise UnknownColumn(f"{path.name}: row {i} has {len(row)} fields, header has {width}")
    return Dataset(path, header, rows)


def _bucket_label(value: str, where: str) -> str:
    try:
        return age_bucket(int(value.strip())).label
    except (ValueError, AgeOutOfRange):
        raise UnparsableAge(f"{where}: cannot place age {value!r} in a 5-year band") from None


def empirical_distribution(
    dataset: Union[str, Path, Dataset],
    attribute: str,
    group_by: GroupBy | Sequence[GroupBy] | None = None,
) -> Histogram | dict[str, Histogram]:
    """Count the values of ``attribute``, optionally split into groups.

    Group labels join the per-column labels with ``/``, e.g. ``15-19`` or
    ``15-19/female``.
    """
    ds = dataset if isinstance(dataset, Dataset) else read_dataset(dataset)
    col = ds.column_index(attribute)
    if group_by is None:
        return Histogram(dict(Counter(row[col] for row in ds.rows)))
    groupings = [group_by] if isinstance(group_by, GroupBy) else list(group_by)
    keyed = [(ds.column_index(g.column), g.bucketing) for g in groupings]
    groups: dict[str, Counter] = {}
    for line, row in enumerate(ds.rows, 2):
        parts = []
        for idx, bucketing in keyed:
            value = row[idx]
            if bucketing == AGE_BUCKETING:
                value = _bucket_label(value, f"{ds.path.name}:{line}")
            parts.append(value.lower() if bucketing == IDENTITY else value)
        groups.setdefault("/".join(parts), Counter())[row[col]] += 1
    return {k: Histogram(dict(groups[k])) for k in sorted(groups)}


def _check_observed(observed: Histogram) -> int:
    n = observed.n
    if n < 1:
        raise EmptyHistogram("histogram has no observations")
    return n


def tv_distance(target: CategoricalDistribution, observed: Histogram) -> float:
    """Half the L1 distance between target probabilities and observed frequencies."""
    n = _check_observed(observed)
    total = target.total_weight
    cats = list(target.all_categories) + [c for c in observed.counts if c not in target.all_categories]
    diff = sum(abs(Fraction(target.weight(c), total) - Fraction(observed.counts.get(c, 0), n)) for c in cats)
    return float(diff / 2)


def chi_square(target: CategoricalDistribution, observed: Histogram) -> tuple[float, int]:
    """Pearson statistic and degrees of freedom.

    Cells with expected count below 5 are pooled into one extra cell; if that
    pool is itself below 5 it joins the retained cell with the smallest
    expected count.
    """
    n = _check_observed(observed)
    total = target.total_weight
    cats = list(target.all_categories) + sorted(c for c in observed.counts if c not in target.all_categories)
    cells: list[list[Fraction]] = []  # [observed, expected]
    pool_o, pool_e, pooled = Fraction(0), Fraction(0), False
    for c in cats:
        o = Fraction(observed.counts.get(c, 0))
        e = Fraction(n * target.weight(c), total)
        if e >= MIN_EXPECTED:
            cells.append([o, e])
        else:
            pool_o += o
            pool_e += e
            pooled = pooled or bool(o or e)
    if pooled:
        if pool_e >= MIN_EXPECTED:
            cells.append([pool_o, pool_e])
        elif cells:
            smallest = min(cells, key=lambda cell: cell[1])
            smallest[0] += pool_o
            smallest[1] += pool_e
    if len(cells) < 2:
        raise InsufficientCells(f"{len(cells)} cell(s) after pooling expected counts below {MIN_EXPECTED}")
    stat = sum((o - e) ** 2 / e for o, e in cells)
    return float(stat), len(cells) - 1


@dataclass
class FidelityEntry:
    attribute: str
    group: str | None
    n: int
    tv: float
    chi2: float | None
    dof: int | None
    missing_categories: list[str]
    unexpected_categories: list[str]
    status: str
    tolerance: float


@dataclass
class FidelityReport:
    dataset: str
    rows: int
    entries: list[FidelityEntry]

    @property
    def passed(self) -> bool:
        return all(e.status != "fail" for e in self.entries)


@dataclass(frozen=True)
class ReportItem:
    """One attribute to check; ``grouping`` is None, ``"age"`` or ``"age_gender"``."""

    attribute: str
    grouping: str | None = None


def _field_for_column(column: str, fixtures: Fixtures) -> str | None:
    names = list(fixtures.tables) + list(fixtures.grouped) + list(fixtures.mappings)
    key = column.strip().casefold()
    for name in names:
        if name.casefold() == key:
            return name
    return None


def default_report_spec(header: Sequence[str], fixtures: Fixtures) -> list[ReportItem]:
    """Every column the fixtures can check, grouped the way it is generated."""
    folded = {h.strip().casefold() for h in header}
    items = []
    for column in header:
        name = _field_for_column(column, fixtures)
        if name is None:
            continue
        if name in fixtures.grouped:
            need_gender = fixtures.grouped[name].group_key_kind == AGE_GENDER_KEYED
            if "age" not in folded or (need_gender and "gender" not in folded):
                continue
            items.append(ReportItem(column, "age_gender" if need_gender else "age"))
        elif fixtures.target_distribution(name) is not None:
            items.append(ReportItem(column, None))
    return items


def _entry(
    attribute: str,
    group: str | None,
    target: CategoricalDistribution,
    observed: Histogram,
    tolerance: float,
) -> FidelityEntry:
    n = observed.n
    tv = tv_distance(target, observed)
    try:
        chi2, dof = chi_square(target, observed)
    except InsufficientCells:
        chi2, dof = None, None
    missing = [c for c in target.categories if c not in observed.counts]
    unexpected = sorted(c for c in observed.counts if c not in target)
    if unexpected:
        status = "fail"
    elif n < MIN_EVALUATED_N:
        status = "excluded"
    else:
        status = "pass" if tv < tolerance else "fail"
    return FidelityEntry(attribute, group, n, tv, chi2, dof, missing, unexpected, status, tolerance)


def _group_target(fixtures: Fixtures, name: str, label: str) -> CategoricalDistribution | None:
    grouped = fixtures.grouped[name]
    bucket_label, _, gender = label.partition("/")
    bucket = AgeBucket.parse(bucket_label)
    try:
        return grouped.get(bucket, gender or None)
    except KeyError:
        return None


def fidelity_report(
    dataset: Union[str, Path, Dataset],
    fixtures: Fixtures,
    spec: Sequence[ReportItem] | None = None,
) -> FidelityReport:
    ds = dataset if isinstance(dataset, Dataset) else read_dataset(dataset)
    if not ds.rows:
        raise EmptyHistogram(f"{ds.path.name} has a header but no records")
    if spec is None:
        spec = default_report_spec(ds.header, fixtures)
    entries: list[FidelityEntry] = []
    for item in spec:
        name = _field_for_column(item.attribute, fixtures)
        if name is None:
            raise UnknownColumn(f"no fixture distribution matches column {item.attribute!r}")
        if item.grouping is None:
            target = fixtures.target_distribution(name)
            if target is None:
                raise UnknownColumn(f"{item.attribute!r} is conditional; report it grouped by age")
            observed = empirical_distribution(ds, item.attribute)
            entries.append(_entry(item.attribute, None, target, observed, TV_TOLERANCE))
            continue
        if name not in fixtures.grouped:
            raise UnknownColumn(f"{item.attribute!r} has no grouped weight tables")
        age_col = next((h for h in ds.header if h.strip().casefold() == "age"), "age")
        groupings = [GroupBy(age_col, AGE_BUCKETING)]
        if item.grouping == "age_gender":
            gender_col = next((h for h in ds.header if h.strip().casefold() == "gender"), "gender")
            groupings.append(GroupBy(gender_col, IDENTITY))
        for label, observed in empirical_distribution(ds, item.attribute, groupings).items():
            target = _group_target(fixtures, name, label)
            if target is None:
                raise UnknownColumn(f"no {name} weight table for group {label}")
            entries.append(_entry(item.attribute, label, target, observed, TV_TOLERANCE_GROUPED))
    return FidelityReport(str(ds.path), len(ds.rows), entries)


def parse_report_item(text: str) -> ReportItem:
    """``MaritalStatus``, ``MaritalStatus:age`` or ``FieldOfStudy:age_gender``."""
    column, _, grouping = text.partition(":")
    grouping = grouping.strip() or None
    if grouping not in (None, "age", "age_gender"):
        raise ValueError(f"unknown grouping {grouping!r} (use age or age_gender)")
    return ReportItem(column.strip(), grouping)


_HEADER_NOTE = (
    f"# tolerances are artifact-defined, not taken from the source statistics: "
    f"tv < {TV_TOLERANCE} ungrouped, tv < {TV_TOLERANCE_GROUPED} per group, "
    f"entries with n < {MIN_EVALUATED_N} excluded, any unexpected category fails"
)
TSV_COLUMNS = ("attribute", "group", "n", "tv", "chi2", "dof", "status")


def to_tsv(report: FidelityReport) -> str:
    """Machine-readable form: ``#`` comment lines, then one tab-separated line per entry."""
    lines = [
        "# synthcensus fidelity report",
        f"# dataset: {report.dataset}",
        f"# rows: {report.rows}",
        _HEADER_NOTE,
        "# " + "\t".join(TSV_COLUMNS),
    ]
    for e in report.entries:
        lines.append(
            "\t".join(
                [
                    e.attribute,
                    e.group or "-",
                    str(e.n),
                    f"{e.tv:.6f}",
                    "NA" if e.chi2 is None else f"{e.chi2:.4f}",
                    "NA" if e.dof is None else str(e.dof),
                    e.status,
                ]
            )
        )
    return "\n".join(lines) + "\n"


def parse_tsv(text: str) -> list[dict[str, str]]:
    rows = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        rows.append(dict(zip(TSV_COLUMNS, line.split("\t"))))
    return rows


def to_text(report: FidelityReport) -> str:
    head = ("attribute", "group", "n", "tv", "tol", "chi2", "dof", "status")
    body = [
        (
            e.attribute,
            e.group or "-",
            str(e.n),
            f"{e.tv:.4f}",
            f"{e.tolerance:.2f}",
            "NA" if e.chi2 is None else f"{e.chi2:.1f}",
            "NA" if e.dof is None else str(e.dof),
            e.status.upper(),
        )
        for e in report.entries
    ]
    widths = [max(len(r[i]) for r in [head, *body]) for i in range(len(head))]
    fmt = "  ".join(f"{{:<{w}}}" if i < 2 else f"{{:>{w}}}" for i, w in enumerate(widths))
    out = [f"Fidelity report for {report.dataset} ({report.rows} records)", _HEADER_NOTE[2:], ""]
    out.append(fmt.format(*head))
    out.append(fmt.format(*("-" * w for w in widths)))
    out.extend(fmt.format(*row) for row in body)
    notes = []
    for e in report.entries:
        where = e.attribute if e.group is None else f"{e.attribute} [{e.group}]"
        if e.unexpected_categories:
            notes.append(f"{where}: unexpected {', '.join(e.unexpected_categories)}")
        if e.missing_categories and e.status != "excluded":
            notes.append(f"{where}: never observed {', '.join(e.missing_categories)}")
    if notes:
        out += ["", *notes]
    failed = sum(e.status == "fail" for e in report.entries)
    out += ["", "PASS" if not failed else f"FAIL ({failed} of {len(report.entries)} entries)"]
    return "\n".join(out) + "\n"
