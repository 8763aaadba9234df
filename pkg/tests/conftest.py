import numpy as np
import pytest

from ampforge.instances import rng_for

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)


def dense_kron(*mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def haar_unitary(dim, seed):
    rng = rng_for(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_unit(dim, seed, complex_=False):
    rng = rng_for(seed)
    v = rng.standard_normal(dim)
    if complex_:
        v = v + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return rng_for(12345)


# Acceptance lines, printed once at the end of the run so they show up
# without ``-s``.
ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    def record(number, passed, detail, seconds):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}  ({seconds:.1f} s)"
        ACCEPTANCE[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
