import pytest

from nonnoether import models


@pytest.fixture(scope="session")
def toda():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = models.build_toda(n)
        return cache[n]

    return get


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    seen = set()
    for line in mod.LINES:
        if line not in seen:
            seen.add(line)
            terminalreporter.write_line(line)
