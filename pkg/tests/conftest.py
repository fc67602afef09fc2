"""Shared pytest wiring: per-criterion verdict lines for the acceptance suite."""

import re

CRITERION = re.compile(r"test_criterion_(\d+)")

_verdicts: dict[int, bool] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    match = CRITERION.search(report.nodeid)
    if match is None:
        return
    number = int(match.group(1))
    passed = report.outcome == "passed"
    _verdicts[number] = _verdicts.get(number, True) and passed


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_verdicts):
        verdict = "PASS" if _verdicts[number] else "FAIL"
        terminalreporter.write_line(f"[acceptance] {number}: {verdict}")
