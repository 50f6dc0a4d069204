from __future__ import annotations

import pytest

_OUTCOMES: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        state = "xfail" if hasattr(rep, "wasxfail") else rep.outcome
        _OUTCOMES.setdefault(mark.args[0], []).append(state)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_OUTCOMES):
        states = _OUTCOMES[n]
        if all(s == "passed" for s in states):
            line = "PASS"
        elif "xfail" in states and all(s in ("passed", "xfail") for s in states):
            line = "FAIL (known unattainable part, strict xfail)"
        else:
            line = "FAIL"
        terminalreporter.write_line(f"criterion {n}: {line}  [{', '.join(states)}]")
