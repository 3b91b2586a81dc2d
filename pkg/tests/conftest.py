import os
import re
import sys
import time

sys.path.insert(0, os.path.dirname(__file__))

_SESSION_START = time.perf_counter()
_CRITERIA = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)_", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _CRITERIA[int(m.group(1))] = (report.outcome, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        outcome, detail = _CRITERIA[n]
        tr.write_line(f"criterion {n}: {'PASS' if outcome == 'passed' else 'FAIL'}  {detail}")
    total = time.perf_counter() - _SESSION_START
    tr.write_line(f"session wall time {total:.1f}s ({'within' if total <= 900 else 'over'} the 900s budget)")
