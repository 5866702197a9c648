import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption("--heavy", action="store_true", default=False, help="run the heavy opt-in checks")


def pytest_configure(config):
    config.addinivalue_line("markers", "heavy: slow check, runs only with --heavy")
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion the test belongs to")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--heavy"):
        return
    skip = pytest.mark.skip(reason="heavy; pass --heavy to run")
    for item in items:
        if "heavy" in item.keywords:
            item.add_marker(skip)


# -- acceptance summary: one line per criterion ---------------------------------

_CRITERIA: dict[int, list] = {}


def _record(item, rep):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    entry = _CRITERIA.setdefault(num, [title, []])
    entry[1].append(rep.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _record(item, rep)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[num]
        ran = [o for o in outcomes if o != "skipped"]
        if any(o == "failed" for o in ran):
            status = "FAIL"
        elif ran:
            status = "PASS"
        else:
            status = "SKIP"
        skipped = len(outcomes) - len(ran)
        extra = f" ({skipped} heavy check skipped)" if skipped and ran else ""
        terminalreporter.write_line(f"criterion {num:>2}: {status}  {title}{extra}")
