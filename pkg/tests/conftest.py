import numpy as np
import pytest
from hypothesis import settings

from blocktrace.blockops import BlockMatrix

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

# rank-one psd matrix with a non-psd partial transpose (n = k = 2)
BELL = np.array([[1, 0, 0, 1],
                [0, 0, 0, 0],
                [0, 0, 0, 0],
                [1, 0, 0, 1]], dtype=np.complex128)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_psd(rng, d, stack=()):
    g = random_complex(rng, stack + (d, d))
    return np.conj(np.swapaxes(g, -1, -2)) @ g


def random_hermitian(rng, d):
    g = random_complex(rng, (d, d))
    return 0.5 * (g + g.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def bell():
    return BlockMatrix(2, 2, BELL.copy())


@pytest.fixture
def identity_file(tmp_path):
    from blocktrace.matrixio import write_matrix_file
    path = tmp_path / "identity.json"
    write_matrix_file(str(path), BlockMatrix(2, 2, np.eye(4)))
    return str(path)


@pytest.fixture
def bell_file(tmp_path):
    from blocktrace.matrixio import write_matrix_file
    path = tmp_path / "bell.json"
    write_matrix_file(str(path), BlockMatrix(2, 2, BELL.copy()))
    return str(path)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance check")


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
