import numpy as np
import pytest

from pskqkd import ProtocolParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_params(rng, letters=None, a_max=3.0):
    n = int(letters or rng.integers(2, 9))
    return ProtocolParams(n, float(rng.uniform(0.0, a_max)), float(rng.uniform(0.0, 1.0)))


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one PASS/FAIL line per acceptance criterion."""
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
