"""Shared pytest hooks.

test_acceptance.py doubles as the sign-off checklist, so the terminal
summary ends with one labeled PASS/FAIL line per criterion, in numeric
order, regardless of how pytest interleaved the runs.
"""

import re

_CRITERION = re.compile(r"test_criterion_(\d{2})_(\w+?)(?:\[|$)")
_verdicts: dict = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    num, slug = m.groups()
    if report.when == "call":
        _verdicts[num] = (slug, report.outcome)
    elif report.failed:
        # setup/teardown crashes count as failures too
        _verdicts[num] = (slug, "failed")


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_verdicts):
        slug, outcome = _verdicts[num]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {num} {slug}: {verdict}")
