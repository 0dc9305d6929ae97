import pytest

_criteria: dict[int, dict] = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.outcome == "failed":
        entry = _criteria.setdefault(props["criterion"], {"title": props["title"], "parts": {}})
        entry["parts"][report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        entry = _criteria[n]
        failed = [name for name, outcome in entry["parts"].items() if outcome != "passed"]
        verdict = "FAIL" if failed else "PASS"
        line = f"criterion {n}: {verdict}  {entry['title']}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        terminalreporter.write_line(line)


@pytest.fixture
def criterion(record_property):
    def mark(n: int, title: str):
        record_property("criterion", n)
        record_property("title", title)
    return mark
