from __future__ import annotations

from pathlib import Path

import pytest

from raicc.catalog import default_catalog
from raicc.corpus import app_files, benchmark_dir, load_app
from raicc.mir import read_app

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, dict] = {}


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def corpus_apps():
    return {path.stem: load_app(path) for path in app_files(benchmark_dir())}


@pytest.fixture
def fixture_app():
    return lambda name: read_app(FIXTURES / name)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    info = getattr(report, "criterion", None)
    if info is None:
        return
    number, title = info
    entry = _criteria.setdefault(number, {"title": title, "ok": True})
    entry["ok"] = entry["ok"] and report.outcome == "passed"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        verdict = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"{verdict} criterion {number}: {entry['title']}")
