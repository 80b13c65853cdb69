import pytest

_OUTCOMES = {}


def pytest_runtest_logreport(report):
    number = getattr(report, "criterion", None)
    if number is None:
        return
    # xfail counts as FAIL; an unexpected pass counts as PASS
    ok = report.passed if report.when == "call" else not report.failed
    if report.when == "call" or not ok:
        _OUTCOMES[number] = _OUTCOMES.get(number, True) and ok


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if _OUTCOMES[number] else 'FAIL'}")
