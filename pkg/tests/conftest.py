"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

from collections import defaultdict

import pytest

_outcomes = defaultdict(list)  # criterion -> [(test id, outcome)]
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    rep = (yield).get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    _titles[n] = title
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if hasattr(rep, "wasxfail"):
            outcome = "xfail"
        else:
            outcome = rep.outcome
        _outcomes[n].append((item.name, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_outcomes):
        res = _outcomes[n]
        ok = all(o == "passed" for _, o in res)
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {_titles[n]}"
        bad = [name for name, o in res if o != "passed"]
        if bad:
            line += f"  (not met: {', '.join(bad)})"
        tr.write_line(line)
