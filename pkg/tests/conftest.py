import pytest

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    num, title = mark.args
    entry = _criteria.setdefault(num, {"title": title, "ok": True, "failed": []})
    if rep.failed:
        entry["ok"] = False
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        line = f"criterion {num}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}"
        if e["failed"]:
            line += f"  (failed: {', '.join(e['failed'])})"
        terminalreporter.write_line(line)
