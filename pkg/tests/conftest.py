import pytest
from hypothesis import settings

from finslercut import metric as fm

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def E2():
    return fm.euclidean()


@pytest.fixture(scope="session")
def RD():
    return fm.randers(b=(0.5, 0.0))


@pytest.fixture(scope="session")
def SP():
    return fm.sphere()


@pytest.fixture(scope="session")
def HY():
    return fm.hyperbolic()



def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for n, m in sys.modules.items() if n.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
