"""Acceptance criteria, one test per criterion.

Each test carries ``@pytest.mark.acceptance(label)``; the conftest hook prints
a PASS/FAIL line per label at the end of the run. Tolerances are written out
literally here rather than imported, so a change in the library cannot
silently loosen them.
"""

import csv
import random
import time
from fractions import Fraction

import pytest

from synthcensus.cli import main
from synthcensus.engine import generate_dataset
from synthcensus.export import CsvLayout, export_csv
from synthcensus.fidelity import Histogram, ReportItem, chi_square, fidelity_report, tv_distance
from synthcensus.errors import InsufficientCells
from synthcensus.weights import AgeBucket, build_distribution, parse_weight_table

from tests.conftest import FULL_DESCRIPTOR, IE_FIXTURES, LISTING_DESCRIPTOR
from tests.domains import BY_COLUMN
from tests.test_weights import MARITAL_15_19, MARITAL_80_84

SEED = 42
BIG_COUNT = 100_000
TV_INDEPENDENT = 0.02
TV_PER_BUCKET = 0.05
MIN_BUCKET_N = 500
SINGLE_15_19 = Fraction(282106, 283019)
SINGLE_SHARE_TOL = 0.01
RUNTIME_LIMIT_S = 5.0
METRIC_REL_TOL = 1e-12

# the elided nationality listing: only the printed rows can be checked
NATIONALITY_ROWS = {
    "Irish": 969087, "Austrian": 554, "Belgian": 932, "Bulgarian": 865,
    "Cypriot": 53, "Czech": 1921, "Australian": 2190, "New Zealander": 914,
}


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


@pytest.fixture(scope="module")
def big_run(tmp_path_factory):
    """100,000 records from the all-attribute descriptor, written through the CLI."""
    out = tmp_path_factory.mktemp("big") / "census.csv"
    code = main(["generate", "-d", str(FULL_DESCRIPTOR), "--seed", str(SEED), "--count", str(BIG_COUNT), "-o", str(out)])
    assert code == 0
    return out


@pytest.mark.acceptance("1. descriptor listing parses: count 30000, 6 attributes, 6 csv columns")
def test_descriptor_compatibility(listing_model):
    assert listing_model.count == 30000
    assert len(listing_model.attributes) == 6
    assert listing_model.consumer.kind == "csv"
    assert len(listing_model.consumer.columns) == 6


@pytest.mark.acceptance("2. weight listings: totals 283019 and 70113 match a summation oracle")
def test_weight_table_exactness(fixtures):
    def oracle(text):
        return sum(int(line.rsplit(",", 1)[1]) for line in text.splitlines() if line.strip())

    assert oracle(MARITAL_15_19) == 283019
    assert oracle(MARITAL_80_84) == 70113
    assert parse_weight_table(MARITAL_15_19).total_weight == oracle(MARITAL_15_19)
    assert parse_weight_table(MARITAL_80_84).total_weight == oracle(MARITAL_80_84)
    listing = "\n".join(f"{k},{v}" for k, v in NATIONALITY_ROWS.items())
    assert parse_weight_table(listing).total_weight == sum(NATIONALITY_ROWS.values())
    # the bundled fixtures carry the same numbers
    nationality = fixtures.tables["nationality"]
    assert all(nationality.weight(k) == v for k, v in NATIONALITY_ROWS.items())
    assert fixtures.grouped["maritalStatus"].groups[AgeBucket(15, 19)].total_weight == 283019
    assert fixtures.grouped["maritalStatus"].groups[AgeBucket(80, 84)].total_weight == 70113


@pytest.mark.acceptance("3. determinism: seed 42, 10000 records, twice plus --threads 4, byte-identical, < 5 s each")
def test_determinism(tmp_path):
    outputs, times = [], []
    for name, extra in [("a", []), ("b", []), ("c", ["--threads", "4"])]:
        out = tmp_path / f"{name}.csv"
        start = time.perf_counter()
        code = main(["generate", "-d", str(LISTING_DESCRIPTOR), "--seed", "42", "--count", "10000", "-o", str(out), *extra])
        times.append(time.perf_counter() - start)
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    assert outputs[0].count(b"\n") == 10001
    assert max(times) < RUNTIME_LIMIT_S, times


@pytest.mark.acceptance("4. domain closure: 100000 records, all values in their domains, ages in [17, 84]")
def test_domain_closure(big_run):
    header, rows = read_csv(big_run)
    assert len(rows) == BIG_COUNT
    violations = []
    for column, domain in BY_COLUMN.items():
        idx = header.index(column)
        allowed = set(domain)
        violations += [(column, r[idx]) for r in rows if r[idx] not in allowed]
    age = header.index("Age")
    violations += [("Age", r[age]) for r in rows if not (r[age].isdigit() and 17 <= int(r[age]) <= 84)]
    name = header.index("FullName")
    violations += [("FullName", r[name]) for r in rows if len(r[name].split(" ")) < 2]
    assert violations == []


@pytest.mark.acceptance("5. fidelity of independent attributes: tv < 0.02 at 100000 records")
def test_fidelity_independent(big_run, fixtures):
    columns = ["Gender", "Age", "County", "NativeCountry"]
    report = fidelity_report(big_run, fixtures, [ReportItem(c) for c in columns])
    tvs = {e.attribute: e.tv for e in report.entries}
    assert set(tvs) == set(columns)
    assert all(e.n == BIG_COUNT and not e.unexpected_categories for e in report.entries)
    assert {c: tv for c, tv in tvs.items() if not tv < TV_INDEPENDENT} == {}


@pytest.mark.acceptance("6. fidelity of marital status per age bucket: tv < 0.05 (n >= 500), 15-19 Single share within 0.01")
def test_fidelity_marital_by_age(big_run, fixtures):
    report = fidelity_report(big_run, fixtures, [ReportItem("MaritalStatus", "age")])
    evaluated = [e for e in report.entries if e.n >= MIN_BUCKET_N]
    assert len(evaluated) >= 10
    assert {e.group: e.tv for e in evaluated if not e.tv < TV_PER_BUCKET} == {}
    header, rows = read_csv(big_run)
    age, marital = header.index("Age"), header.index("MaritalStatus")
    teen = [r[marital] for r in rows if int(r[age]) <= 19]
    assert len(teen) >= MIN_BUCKET_N
    share = teen.count("Single") / len(teen)
    assert abs(share - float(SINGLE_15_19)) <= SINGLE_SHARE_TOL, share


def _raw_weight(filename, category):
    with open(IE_FIXTURES / filename, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if row and ",".join(row[:-1]) == category:
                return int(row[-1])
    raise KeyError(category)


@pytest.mark.acceptance("7. constraint soundness: no zero-weight dependent value in 10000 records")
def test_constraint_soundness(full_model, full_plan, fixtures, tmp_path):
    layout = CsvLayout.for_descriptor(full_model, tmp_path / "c.csv")
    export_csv(generate_dataset(full_plan, 10_000, SEED, fixtures), layout)
    header, rows = read_csv(layout.path)
    by_age = {"MaritalStatus": "MaritalStatus", "EconomicStatus": "EconomicStatus", "Education": "Education"}
    by_age_gender = {"IndustrialGroup": "IndustrialGroup", "FieldOfStudy": "FieldOfStudy"}
    col = {h: i for i, h in enumerate(header)}
    cache = {}
    violations = []
    for row in rows:
        age = int(row[col["Age"]])
        low = 15 + (age - 15) // 5 * 5
        band = f"{low}-{low + 4}"
        sex = row[col["Gender"]].capitalize()
        files = [(c, f"{stem}Qty{band}.csv") for c, stem in by_age.items()]
        files += [(c, f"{stem}Qty_{sex}_{band}.csv") for c, stem in by_age_gender.items()]
        for column, filename in files:
            key = (filename, row[col[column]])
            if key not in cache:
                cache[key] = _raw_weight(*key)
            if cache[key] == 0:
                violations.append((column, band, sex, row[col[column]]))
    assert violations == []
    # the fixtures do contain zero cells in reachable groups, so the check has teeth
    assert _raw_weight("MaritalStatusQty15-19.csv", "Single") > 0
    assert _raw_weight("EconomicStatusQty15-19.csv", "Retired") == 0
    assert _raw_weight("IndustrialGroupQty_Female_80-84.csv", "Activities of households as employers producing activities of households for own use (T)") == 0


def _brute_tv(weights, counts):
    total, n = sum(weights.values()), sum(counts.values())
    keys = set(weights) | set(counts)
    return sum(abs(Fraction(weights.get(k, 0), total) - Fraction(counts.get(k, 0), n)) for k in keys) / 2


def _brute_chi2(weights, counts):
    total, n = sum(weights.values()), sum(counts.values())
    keys = list(weights) + sorted(k for k in counts if k not in weights)
    cells, small = [], []
    for k in keys:
        e = Fraction(n * weights.get(k, 0), total)
        (cells if e >= 5 else small).append((Fraction(counts.get(k, 0)), e))
    if any(o or e for o, e in small):
        po, pe = sum(o for o, _ in small), sum(e for _, e in small)
        if pe >= 5:
            cells.append((po, pe))
        elif cells:
            i = min(range(len(cells)), key=lambda j: cells[j][1])
            cells[i] = (cells[i][0] + po, cells[i][1] + pe)
    if len(cells) < 2:
        return None
    return sum((o - e) ** 2 / e for o, e in cells), len(cells) - 1


def _close(a, b):
    return a == b == 0 or abs(a - b) <= METRIC_REL_TOL * max(abs(a), abs(b))


@pytest.mark.acceptance("8. metric oracle: tv and chi-square match brute force on 100 random pairs within 1e-12")
def test_metric_oracle_equivalence():
    rng = random.Random(20240601)
    chi_checked = 0
    for _ in range(100):
        k = rng.randint(1, 8)
        weights = {f"c{i}": rng.choice([0, rng.randint(1, 1000)]) for i in range(k)}
        if not any(weights.values()):
            weights["c0"] = 1
        counts = {f"c{i}": rng.randint(0, 200) for i in range(k) if rng.random() < 0.9}
        if rng.random() < 0.2:
            counts["extra"] = rng.randint(1, 10)
        counts = {c: v for c, v in counts.items() if v}
        if not counts:
            counts = {"c0": 1}
        target = build_distribution(parse_weight_table("\n".join(f"{c},{w}" for c, w in weights.items())))
        observed = Histogram(counts)
        assert _close(tv_distance(target, observed), float(_brute_tv(weights, counts)))
        expected = _brute_chi2(weights, counts)
        if expected is None:
            with pytest.raises(InsufficientCells):
                chi_square(target, observed)
            continue
        stat, dof = chi_square(target, observed)
        assert dof == expected[1]
        assert _close(stat, float(expected[0]))
        chi_checked += 1
    assert chi_checked >= 50


@pytest.mark.acceptance("9. csv round trip: 1000 records re-read with identical values and order")
def test_csv_round_trip(full_model, full_plan, fixtures, tmp_path):
    layout = CsvLayout.for_descriptor(full_model, tmp_path / "rt.csv")
    records = list(generate_dataset(full_plan, 1000, SEED, fixtures))
    assert export_csv(records, layout).rows == 1000
    header, rows = read_csv(layout.path)
    assert header == list(layout.columns)
    assert rows == [[rec[layout.binding[c]] for c in layout.columns] for rec in records]
