"""Discover and load a fixture directory.

File naming conventions (all UTF-8 CSV, no header):

* ``<Attr>.csv`` - unconditional weight table for field ``attr``
* ``<Attr>Qty<lo>-<hi>.csv`` - table per age bucket
* ``<Attr>Qty_<Gender>_<lo>-<hi>.csv`` - table per gender and age bucket
* ``GivenNames_<Nationality>_<Gender>.csv`` / ``FamilyNames_<Nationality>.csv``
  - weighted name lists, ``Default`` standing in for unlisted nationalities
* ``Map_<Source>_<Target>.csv`` - ``source value,target value`` pairs
* ``ComposedFields.csv`` - ``field,script`` pairs; scripts refer to sibling
  fields as ``self.<field>``

Field names are the file stems with a lower-case first letter
(``MaritalStatus`` -> ``maritalStatus``).
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Union

from synthcensus.errors import BadFileNamePattern, ConfigError, FixtureMissing
from synthcensus.schema import ScriptExpr, parse_script
from synthcensus.weights import (
    AGE_GENDER_KEYED,
    AGE_KEYED,
    GENDER_TOKENS,
    MAX_AGE,
    MIN_AGE,
    CategoricalDistribution,
    GroupedDistributionSet,
    WeightTable,
    build_distribution,
    gender_token,
    load_grouped,
    read_weight_table,
)

DEFAULT_NATIONALITY = "Default"
COMPOSED_FILE = "ComposedFields.csv"

_STEM = re.compile(r"[A-Z][A-Za-z0-9]*")
_GROUPED = re.compile(r"([A-Z][A-Za-z0-9]*?)Qty(_[A-Za-z]+_)?\d+-\d+\.csv")
_GIVEN = re.compile(r"GivenNames_([A-Za-z0-9]+)_([A-Za-z]+)\.csv")
_FAMILY = re.compile(r"FamilyNames_([A-Za-z0-9]+)\.csv")
_MAP = re.compile(r"Map_([A-Z][A-Za-z0-9]*)_([A-Z][A-Za-z0-9]*)\.csv")


def field_name(stem: str) -> str:
    return stem[:1].lower() + stem[1:]


def nationality_token(value: str) -> str:
    """File-name token for a nationality: ``New Zealander`` -> ``NewZealander``."""
    return re.sub(r"[^A-Za-z0-9]", "", value)


def bundled_fixtures_dir() -> Path:
    return Path(str(resources.files("synthcensus") / "data" / "fixtures"))


def resolve_region_dir(root: Union[str, Path], region: str | None) -> Path:
    """``root/<region>`` when it exists, else ``root`` itself."""
    root = Path(root)
    if not root.is_dir():
        raise ConfigError(f"fixtures directory {root} does not exist")
    if region:
        sub = root / region
        if sub.is_dir():
            return sub
    return root


def _read_pairs(path: Path) -> list[tuple[str, str]]:
    pairs = []
    reader = csv.reader(io.StringIO(path.read_text(encoding="utf-8"), newline=""))
    for row in reader:
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) < 2:
            raise ConfigError(f"{path.name}:{reader.line_num}: expected two fields")
        pairs.append((",".join(row[:-1]).strip(), row[-1].strip()))
    return pairs


@dataclass
class Fixtures:
    root: Path
    tables: dict[str, CategoricalDistribution] = field(default_factory=dict)
    grouped: dict[str, GroupedDistributionSet] = field(default_factory=dict)
    given_names: dict[tuple[str, str], CategoricalDistribution] = field(default_factory=dict)
    family_names: dict[str, CategoricalDistribution] = field(default_factory=dict)
    mappings: dict[str, tuple[str, dict[str, str]]] = field(default_factory=dict)
    composed: dict[str, ScriptExpr] = field(default_factory=dict)
    sources: dict[str, str] = field(default_factory=dict)

    def given_name_table(self, nationality: str, gender: str) -> CategoricalDistribution:
        g = gender_token(gender)
        for nat in (nationality_token(nationality), DEFAULT_NATIONALITY):
            table = self.given_names.get((nat, g))
            if table is not None:
                return table
        raise FixtureMissing(f"no GivenNames_{nationality_token(nationality)}_{g}.csv and no Default fallback")

    def family_name_table(self, nationality: str) -> CategoricalDistribution:
        for nat in (nationality_token(nationality), DEFAULT_NATIONALITY):
            table = self.family_names.get(nat)
            if table is not None:
                return table
        raise FixtureMissing(f"no FamilyNames_{nationality_token(nationality)}.csv and no Default fallback")

    def check_name_coverage(self) -> None:
        """Raise FixtureMissing if some nationality/gender has no name table."""
        nationalities = self.tables.get("nationality")
        genders = self.tables.get("gender")
        if nationalities is None:
            return
        for nat in nationalities.categories:
            if self.family_names:
                self.family_name_table(nat)
            if self.given_names and genders is not None:
                for gender in genders.categories:
                    self.given_name_table(nat, gender)

    def target_distribution(self, name: str) -> CategoricalDistribution | None:
        """Unconditional distribution of ``name`` implied by the fixtures.

        Mapped fields get the push-forward of their source table; fields
        without an unconditional form (grouped, names, composed) give None.
        """
        if name in self.tables:
            return self.tables[name]
        if name in self.mappings:
            source, mapping = self.mappings[name]
            base = self.tables.get(source)
            if base is None:
                return None
            weights: dict[str, int] = {}
            for category in base.all_categories:
                target = mapping[category]
                weights[target] = weights.get(target, 0) + base.weight(category)
            return build_distribution(WeightTable(tuple(weights.items())))
        return None

    def domain(self, name: str) -> set[str] | None:
        """Every value field ``name`` can take (zero-weight categories included)."""
        if name in self.tables:
            return set(self.tables[name].all_categories)
        if name in self.grouped:
            out: set[str] = set()
            for _, dist in self.grouped[name].items():
                out.update(dist.all_categories)
            return out
        if name in self.mappings:
            return set(self.mappings[name][1].values())
        return None


def load_fixtures(directory: Union[str, Path]) -> Fixtures:
    """Load every recognised file in ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ConfigError(f"fixtures directory {directory} does not exist")
    fx = Fixtures(root=directory)
    grouped_attrs: dict[str, str] = {}
    map_files: list[tuple[Path, str, str]] = []
    for path in sorted(directory.iterdir()):
        name = path.name
        if not name.endswith(".csv") or not path.is_file():
            continue
        if name == COMPOSED_FILE:
            for fname, script in _read_pairs(path):
                if not _STEM.fullmatch(fname[:1].upper() + fname[1:]):
                    raise ConfigError(f"{name}: invalid field name {fname!r}")
                expr = parse_script(script)
                for ref in expr.field_refs():
                    if ref.variable != "self":
                        raise ConfigError(f"{name}: {fname} must refer to fields as self.<field>, got {ref}")
                fx.composed[fname] = expr
                fx.sources[fname] = name
        elif m := _GIVEN.fullmatch(name):
            nat, gender = m.groups()
            if gender not in GENDER_TOKENS:
                raise BadFileNamePattern(f"{name}: gender token must be one of {GENDER_TOKENS}")
            fx.given_names[(nat, gender)] = build_distribution(read_weight_table(path))
        elif m := _FAMILY.fullmatch(name):
            fx.family_names[m.group(1)] = build_distribution(read_weight_table(path))
        elif m := _MAP.fullmatch(name):
            map_files.append((path, m.group(1), m.group(2)))
        elif m := _GROUPED.fullmatch(name):
            stem = m.group(1)
            kind = AGE_GENDER_KEYED if m.group(2) else AGE_KEYED
            if grouped_attrs.setdefault(stem, kind) != kind:
                raise BadFileNamePattern(f"{stem} mixes age-keyed and age-and-gender-keyed files")
        elif "Qty" in name:
            raise BadFileNamePattern(f"{name} looks like a grouped table but does not match <Attr>Qty[_<Gender>_]<lo>-<hi>.csv")
        elif _STEM.fullmatch(path.stem):
            fx.tables[field_name(path.stem)] = build_distribution(read_weight_table(path))
            fx.sources[field_name(path.stem)] = name
        else:
            raise BadFileNamePattern(f"{name} matches no fixture naming convention")

    for stem, kind in sorted(grouped_attrs.items()):
        fx.grouped[field_name(stem)] = load_grouped(directory, stem, kind)
        fx.sources[field_name(stem)] = f"{stem}Qty*.csv"

    for path, source_stem, target_stem in map_files:
        source, target = field_name(source_stem), field_name(target_stem)
        mapping = dict(_read_pairs(path))
        base = fx.tables.get(source)
        if base is not None:
            unmapped = [c for c in base.all_categories if c not in mapping]
            if unmapped:
                raise ConfigError(f"{path.name}: no mapping for {unmapped[0]!r} from {source_stem}.csv")
        fx.mappings[target] = (source, mapping)
        fx.sources[target] = path.name

    if "age" in fx.tables:
        for category in fx.tables["age"].all_categories:
            if not re.fullmatch(r"[0-9]+", category):
                raise ConfigError(f"{fx.sources['age']}: age category {category!r} is not an integer")
            if not MIN_AGE <= int(category) <= MAX_AGE:
                raise ConfigError(f"{fx.sources['age']}: age {category} lies outside {MIN_AGE}-{MAX_AGE}")

    if not (fx.tables or fx.grouped or fx.given_names or fx.family_names):
        raise ConfigError(f"no weight tables found in {directory}")
    return fx
