import numpy as np
import pytest

from analog_ecc import AnalogCode

_ACCEPTANCE = []


def random_unit_code(rng, r, n, label="random"):
    """Code with i.i.d. Gaussian parity-check columns normalized to unit length."""
    H = rng.standard_normal((r, n))
    H /= np.linalg.norm(H, axis=0)
    return AnalogCode(H, label=label)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


@pytest.fixture
def three_column_code():
    # columns e1, e2, (e1 + e2)/sqrt(2) in the plane
    s = 1 / np.sqrt(2)
    return AnalogCode(np.array([[1.0, 0.0, s], [0.0, 1.0, s]]), label="three-columns")


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
