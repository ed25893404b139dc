import numpy as np
import pytest

from jordangeom.algebra import AlgebraElement

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)

# lines collected by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def el(m) -> AlgebraElement:
    return AlgebraElement.from_matrix(m)


def close(a: AlgebraElement, b, tol=1e-12) -> bool:
    b = b if isinstance(b, AlgebraElement) else el(b)
    return all(np.abs(x - y).max() <= tol for x, y in zip(a.blocks, b.blocks))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
