from pathlib import Path

import pytest

from synthcensus.engine import build_plan, catalog_from_fixtures
from synthcensus.fixtures import bundled_fixtures_dir, load_fixtures
from synthcensus.schema import parse_descriptor

HERE = Path(__file__).parent
LISTING_DESCRIPTOR = HERE / "fixtures" / "PersonCensusDescriptor.xml"
FULL_DESCRIPTOR = HERE.parent / "descriptors" / "person_census_full.xml"
IE_FIXTURES = bundled_fixtures_dir() / "IE"

_acceptance_results: list[tuple[str, bool]] = []


@pytest.fixture(scope="session")
def fixtures():
    return load_fixtures(IE_FIXTURES)


@pytest.fixture(scope="session")
def listing_model():
    return parse_descriptor(LISTING_DESCRIPTOR.read_bytes())


@pytest.fixture(scope="session")
def full_model():
    return parse_descriptor(FULL_DESCRIPTOR.read_bytes())


@pytest.fixture(scope="session")
def listing_plan(listing_model, fixtures):
    return build_plan(listing_model, catalog_from_fixtures(fixtures))


@pytest.fixture(scope="session")
def full_plan(full_model, fixtures):
    return build_plan(full_model, catalog_from_fixtures(fixtures))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.get_closest_marker("acceptance"):
        criterion = item.get_closest_marker("acceptance").args[0]
        _acceptance_results.append((criterion, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed in _acceptance_results:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}")
