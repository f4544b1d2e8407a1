import math

import pytest

from driftmimo.geometry import SPEED_OF_LIGHT, ArrayConfig

F0 = 2e9
LAMBDA0 = SPEED_OF_LIGHT / F0


@pytest.fixture
def two_element():
    """Two Rx elements half a wavelength apart, broadside tilt."""
    return ArrayConfig(m_t=1, m_r=2, delta_r=LAMBDA0 / 2, beta_r=math.pi / 2, f0=F0)


@pytest.fixture
def hundred_element():
    return ArrayConfig(m_t=1, m_r=100, delta_r=LAMBDA0 / 2, beta_r=math.pi / 2, f0=F0)


_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _CRITERIA[number] = (title, "PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[number]
        line = f"criterion {number:2d} {status}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
