import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when not in ("setup", "call"):
        return
    if report.when == "setup" and report.passed:
        return
    num = marker.kwargs["criterion"]
    entry = _CRITERIA.setdefault(num, {"title": marker.kwargs.get("title", ""), "parts": []})
    entry["parts"].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        entry = _CRITERIA[num]
        failed = [name for name, outcome in entry["parts"] if outcome != "passed"]
        verdict = "FAIL" if failed else "PASS"
        line = f"criterion {num}: {verdict}  {entry['title']}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        tr.write_line(line)
