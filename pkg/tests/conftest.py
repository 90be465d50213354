import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs the whole verify suite")


def pytest_terminal_summary(terminalreporter):
    import test_acceptance as acc

    if acc.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acc.summary_lines():
            terminalreporter.write_line(line)


@pytest.fixture
def ctx():
    from warpgeo.verify import VerifyContext

    return VerifyContext(seed=0)
