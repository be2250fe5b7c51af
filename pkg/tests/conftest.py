import numpy as np
import pytest

ACCEPTANCE_LINES = []


def random_orthonormal(rng, m, k):
    q, r = np.linalg.qr(rng.standard_normal((m, k)))
    return q * np.sign(np.diag(r))


def random_unit_columns(rng, n, k):
    P = rng.standard_normal((n, k))
    return P / np.linalg.norm(P, axis=0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
