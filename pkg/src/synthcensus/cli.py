"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 generation error,
3 I/O error, 4 fidelity report with failing entries.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from synthcensus.engine import build_plan, catalog_from_fixtures, generate_dataset
from synthcensus.errors import ConfigError, IoFailure, SynthCensusError
from synthcensus.export import CsvLayout, export_csv
from synthcensus.fidelity import fidelity_report, parse_report_item, to_text, to_tsv
from synthcensus.fixtures import Fixtures, bundled_fixtures_dir, load_fixtures, resolve_region_dir
from synthcensus.rng import parse_seed
from synthcensus.schema import DescriptorModel, parse_descriptor
from synthcensus.weights import CategoricalDistribution, WeightTable, build_distribution

EXIT_REPORT_FAILED = 4


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors, not generation errors
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    try:
        return parse_seed(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be at least 1")
    return value


def _read_descriptor(path: Path) -> DescriptorModel:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read descriptor {path}: {exc.strerror or exc}") from None
    try:
        return parse_descriptor(data)
    except SynthCensusError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def _region(model: DescriptorModel | None) -> str | None:
    if model is None:
        return None
    for var in model.variables:
        if var.dataset_region:
            return var.dataset_region
    return model.dataset_region


def _load(args: argparse.Namespace, model: DescriptorModel | None, default_region: str = "IE") -> Fixtures:
    root = Path(args.fixtures) if args.fixtures else bundled_fixtures_dir()
    return load_fixtures(resolve_region_dir(root, _region(model) or default_region))


def _output_path(args: argparse.Namespace, model: DescriptorModel) -> Path:
    if getattr(args, "output", None):
        return Path(args.output)
    uri = Path(model.consumer.uri)
    return uri if uri.is_absolute() else Path(args.descriptor).parent / uri


def cmd_generate(args: argparse.Namespace) -> int:
    model = _read_descriptor(Path(args.descriptor))
    fixtures = _load(args, model)
    plan = build_plan(model, catalog_from_fixtures(fixtures))
    count = args.count or model.count
    layout = CsvLayout.for_descriptor(model, _output_path(args, model))
    started = time.perf_counter()
    records = generate_dataset(plan, count, args.seed, fixtures, threads=args.threads)
    summary = export_csv(records, layout)
    elapsed = time.perf_counter() - started
    print(
        f"generated {summary.rows} {model.entity_type} records -> {summary.path} "
        f"(seed {args.seed}, {elapsed:.2f}s, threads {args.threads})",
        file=sys.stderr,
    )
    return 0


def _describe_field(fixtures: Fixtures, name: str) -> str:
    if name in fixtures.tables:
        return f"{fixtures.sources.get(name, name)}: {len(fixtures.tables[name].all_categories)} categories"
    if name in fixtures.grouped:
        g = fixtures.grouped[name]
        return f"{fixtures.sources.get(name, name)}: {len(g)} groups ({g.group_key_kind})"
    if name in fixtures.mappings:
        return f"{fixtures.sources.get(name, name)}: {len(fixtures.mappings[name][1])} mapped values"
    if name == "givenName":
        return f"{len(fixtures.given_names)} given-name tables"
    if name == "familyName":
        return f"{len(fixtures.family_names)} family-name tables"
    if name in fixtures.composed:
        return f"composed: {fixtures.composed[name]}"
    return "-"


def cmd_validate(args: argparse.Namespace) -> int:
    model = _read_descriptor(Path(args.descriptor))
    fixtures = _load(args, model)
    plan = build_plan(model, catalog_from_fixtures(fixtures))
    # name tables are looked up lazily during generation; check coverage now
    fixtures.check_name_coverage()
    print(f"descriptor {args.descriptor}: {model.entity_type}, count {model.count}, "
          f"{len(model.attributes)} attributes, csv -> {model.consumer.uri}")
    print(f"fixtures {fixtures.root}")
    print("plan:")
    for line in plan.describe():
        print(line)
    print("fixtures used:")
    for step in plan.field_steps:
        print(f"  {step.generator.name}: {_describe_field(fixtures, step.generator.name)}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    model = _read_descriptor(Path(args.descriptor)) if args.descriptor else None
    if args.dataset:
        dataset = Path(args.dataset)
    elif model is not None:
        dataset = _output_path(args, model)
    else:
        raise ConfigError("report needs a dataset path or a descriptor (-d)")
    if not dataset.is_file():
        raise ConfigError(f"dataset {dataset} does not exist")
    fixtures = _load(args, model, default_region=args.region)
    try:
        spec = [parse_report_item(a) for a in args.attribute] if args.attribute else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = fidelity_report(dataset, fixtures, spec)
    prefix = Path(args.report_out) if args.report_out else dataset.with_suffix(".fidelity")
    text = to_text(report)
    try:
        prefix.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{prefix}.tsv").write_text(to_tsv(report), encoding="utf-8")
        Path(f"{prefix}.txt").write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write report {prefix}: {exc.strerror or exc}") from None
    sys.stdout.write(text)
    print(f"report written to {prefix}.tsv and {prefix}.txt", file=sys.stderr)
    return 0 if report.passed else EXIT_REPORT_FAILED


def _summary_rows(fixtures: Fixtures) -> list[tuple[str, CategoricalDistribution]]:
    rows: list[tuple[str, CategoricalDistribution]] = []
    for name, dist in fixtures.tables.items():
        rows.append((fixtures.sources.get(name, name), dist))
    for name, grouped in fixtures.grouped.items():
        pooled: dict[str, int] = {}
        for _, dist in grouped.items():
            for c in dist.all_categories:
                pooled[c] = pooled.get(c, 0) + dist.weight(c)
        rows.append((f"{fixtures.sources.get(name, name)} (all groups)", build_distribution(WeightTable(tuple(pooled.items())))))
    for name in fixtures.mappings:
        target = fixtures.target_distribution(name)
        if target is not None:
            rows.append((f"{fixtures.sources.get(name, name)} (mapped)", target))
    for (nat, gender), dist in sorted(fixtures.given_names.items()):
        rows.append((f"GivenNames_{nat}_{gender}.csv", dist))
    for nat, dist in sorted(fixtures.family_names.items()):
        rows.append((f"FamilyNames_{nat}.csv", dist))
    return rows


def _pct(p: Fraction) -> str:
    return f"{float(p) * 100:.1f}%"


def cmd_inspect(args: argparse.Namespace) -> int:
    fixtures = _load(args, None, default_region=args.region)
    rows = _summary_rows(fixtures)
    print(f"fixtures {fixtures.root}")
    width = max(len(name) for name, _ in rows)
    print(f"{'table':<{width}}  {'categories':>10}  {'total weight':>12}  top categories")
    for name, dist in rows:
        ranked = sorted(dist.categories, key=lambda c: (-dist.weight(c), dist.categories.index(c)))[:3]
        top = "; ".join(f"{c} {_pct(dist.probability(c))}" for c in ranked)
        print(f"{name:<{width}}  {len(dist.all_categories):>10}  {dist.total_weight:>12}  {top}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="synthcensus", description="Generate census-like synthetic microdata from weight tables.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fixtures_flag(p: argparse.ArgumentParser) -> None:
        p.add_argument("-f", "--fixtures", help="fixture directory (default: bundled Irish fixtures)")

    gen = sub.add_parser("generate", help="generate a dataset as described by a descriptor")
    gen.add_argument("-d", "--descriptor", required=True)
    fixtures_flag(gen)
    gen.add_argument("--seed", type=_seed, default=0, help="decimal or 0x-hex 64-bit seed (default 0)")
    gen.add_argument("--count", type=_positive, help="override the descriptor's record count")
    gen.add_argument("-o", "--output", help="override the consumer uri")
    gen.add_argument("--threads", type=_positive, default=1)
    gen.set_defaults(func=cmd_generate)

    val = sub.add_parser("validate", help="check descriptor and fixtures, print the generation plan")
    val.add_argument("-d", "--descriptor", required=True)
    fixtures_flag(val)
    val.set_defaults(func=cmd_validate)

    rep = sub.add_parser("report", help="compare a dataset with the fixture distributions")
    rep.add_argument("dataset", nargs="?", help="CSV dataset (default: the descriptor's output)")
    rep.add_argument("-d", "--descriptor")
    fixtures_flag(rep)
    rep.add_argument("-o", "--output", help="dataset path when taken from a descriptor")
    rep.add_argument("-a", "--attribute", action="append", metavar="COLUMN[:age|:age_gender]",
                     help="attribute to check (repeatable; default: every column the fixtures cover)")
    rep.add_argument("--report-out", metavar="PREFIX", help="write PREFIX.tsv and PREFIX.txt")
    rep.add_argument("--region", default="IE", help="fixture subdirectory when no descriptor is given")
    rep.set_defaults(func=cmd_report)

    ins = sub.add_parser("inspect", help="summarise the weight tables in a fixture directory")
    fixtures_flag(ins)
    ins.add_argument("--region", default="IE", help="fixture subdirectory to use when present")
    ins.set_defaults(func=cmd_inspect)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, usage errors exit 1
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except SynthCensusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IoFailure.exit_code


if __name__ == "__main__":
    sys.exit(main())
