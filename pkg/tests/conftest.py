import numpy as np
import pytest

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record a named acceptance criterion; the outcome is printed in the summary."""

    def record(name, passed, detail):
        _CRITERIA[name] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        passed, detail = _CRITERIA[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)
