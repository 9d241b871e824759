from datetime import date, timedelta
from pathlib import Path

import numpy as np
import pytest

from sentigranger.timeseries import AlignedPair

FIXTURES = Path(__file__).parent / "fixtures"


def days(n, start=date(2015, 5, 4)):
    return tuple(start + timedelta(days=i) for i in range(n))


def make_pair(y, x):
    y = np.asarray(y, dtype=float)
    return AlignedPair(days(len(y)), y, np.asarray(x, dtype=float))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


_ACCEPTANCE: list[tuple[str, str, float]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and rep.when == "call":
        _ACCEPTANCE.append(("PASS" if rep.passed else "FAIL", marker.args[0], rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, name, duration in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {name}  ({duration:.2f} s)")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")
