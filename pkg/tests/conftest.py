import numpy as np
import pytest

from abcsim import families


@pytest.fixture(scope="session")
def rep5():
    return families.rep5_fixture()


@pytest.fixture(scope="session")
def rep5_fault(rep5):
    return families.rep5_fault(rep5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
