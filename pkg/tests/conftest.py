import math

import pytest

from bellgeom import available_backends, make_family

SHIPPED = ("cosine", "power:1/3")
VALID_SPECS = ("cosine", "power:1/3", "power:0.1", "power:0.25", "power:0.5", "power:1")


@pytest.fixture(scope="session")
def cosine():
    return make_family("cosine")


@pytest.fixture(scope="session")
def power_third():
    return make_family("power:1/3")


@pytest.fixture(scope="session", params=SHIPPED)
def shipped(request):
    return make_family(request.param)


@pytest.fixture(scope="session", params=VALID_SPECS)
def valid_family(request):
    return make_family(request.param)


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


def circle_distance(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


_criteria: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        previous = _criteria.get(number, (None, ""))[0]
        status = "FAIL" if failed or previous == "FAIL" else "PASS"
        _criteria[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"{status}  criterion {number:2d}: {title}")
