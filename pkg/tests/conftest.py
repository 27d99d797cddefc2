import pytest

from diracembed import ModelParams


@pytest.fixture
def bench():
    """Hydrogen in the R=3, V0=10 cavity used for the convergence table."""
    return ModelParams(R=3.0, V0=10.0, Z=1.0)


@pytest.fixture
def resonance_model():
    """Shallow cavity whose continuum shows resonances."""
    return ModelParams(R=3.0, V0=1.0, Z=1.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
