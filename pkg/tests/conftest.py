import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    number = getattr(item.function, "criterion", None)
    if number is None or rep.when != "call":
        return
    title = item.function.criterion_title
    if rep.passed:
        _RESULTS[number] = ("PASS", title, "")
    else:
        msg = str(rep.longrepr.reprcrash.message) if hasattr(rep.longrepr, "reprcrash") else ""
        _RESULTS[number] = ("FAIL", title, msg.splitlines()[0] if msg else "")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        verdict, title, msg = _RESULTS[number]
        line = f"criterion {number}: {verdict}  {title}"
        terminalreporter.write_line(line + (f"  -- {msg}" if msg else ""))
