from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = _acceptance_marker.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    prev = _acceptance.get(number, (title, True))
    _acceptance[number] = (title, prev[1] and report.passed)


_acceptance_marker = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _acceptance_marker[item.nodeid] = m.args


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, ok = _acceptance[number]
        terminalreporter.write_line(f"AC{number} {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def city_dir():
    return FIXTURES / "city"
