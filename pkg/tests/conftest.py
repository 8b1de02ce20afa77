import pytest

ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for _, r in sorted(results.items()):
        terminalreporter.write_line(r.line())
    failed = sum(not r.passed for r in results.values())
    terminalreporter.write_line(f"{len(results) - failed} passed, {failed} failed")
