"""CSV output for generated records."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Union

from synthcensus.errors import IoFailure, UnboundColumn
from synthcensus.schema import DescriptorModel, bind_columns

_NEEDS_QUOTES = frozenset(',"\r\n')


@dataclass(frozen=True)
class CsvLayout:
    path: Path
    columns: tuple[str, ...]
    binding: Mapping[str, str]  # column -> attribute

    @classmethod
    def for_descriptor(cls, model: DescriptorModel, path: Union[str, Path]) -> "CsvLayout":
        columns = model.consumer.columns
        return cls(Path(path), tuple(columns), bind_columns(columns, [a.name for a in model.attributes]))


@dataclass(frozen=True)
class ExportSummary:
    path: Path
    rows: int


def format_field(value: str) -> str:
    if _NEEDS_QUOTES.isdisjoint(value):
        return value
    return '"' + value.replace('"', '""') + '"'


def format_row(values: Iterable[str]) -> str:
    return ",".join(format_field(v) for v in values) + "\n"


def export_csv(records: Iterable[Mapping[str, str]], layout: CsvLayout) -> ExportSummary:
    """Write a header row and one row per record; fields are quoted only when needed."""
    for column in layout.columns:
        if column not in layout.binding:
            raise UnboundColumn(f"column {column!r} is not bound to an attribute")
    attrs = [layout.binding[c] for c in layout.columns]
    rows = 0
    tmp = layout.path.with_name(layout.path.name + ".part")
    try:
        layout.path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_row(layout.columns))
            for record in records:
                try:
                    fh.write(format_row([record[a] for a in attrs]))
                except KeyError as exc:
                    raise UnboundColumn(f"record has no attribute {exc.args[0]!r}") from None
                rows += 1
        os.replace(tmp, layout.path)
    except OSError as exc:
        raise IoFailure(f"cannot write {layout.path}: {exc.strerror or exc}") from None
    finally:
        if tmp.exists():
            tmp.unlink()
    return ExportSummary(layout.path, rows)
