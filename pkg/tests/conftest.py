import numpy as np
import pytest

from firstquant.grid import make_state

ACCEPTANCE_LINES: list[str] = []


def random_real_state(rng: np.random.Generator, qubits: int):
    return make_state(rng.normal(size=2**qubits))


def random_complex_state(rng: np.random.Generator, qubits: int):
    n = 2**qubits
    return make_state(rng.normal(size=n) + 1j * rng.normal(size=n))


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def pytest_terminal_summary(terminalreporter):
    # test modules import this file as plain ``conftest``, which under
    # importlib mode is a different module object from the one pytest loaded
    import conftest as shared

    if shared.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in shared.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
