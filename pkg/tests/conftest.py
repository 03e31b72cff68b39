import re
from collections import defaultdict

_criteria: dict[int, list[str]] = defaultdict(list)


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)_", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _criteria[int(m.group(1))].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        ok = all(o == "passed" for o in _criteria[k])
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}")
