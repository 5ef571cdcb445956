import numpy as np
import pytest
from hypothesis import given, strategies as st

from blocktrace.blockops import BlockMatrix
from blocktrace.harness.identities import (identity_suite, pauli_average,
                                           pauli_average_explicit, pauli_matrices,
                                           root_of_unity_powers)

from conftest import random_complex


class TestPauli:
    def test_n2_matrices(self):
        x, y = pauli_matrices(2)
        assert np.array_equal(x, [[0, 1], [1, 0]])
        assert np.array_equal(y, np.diag([-1, 1]))

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_shift_and_clock(self, n):
        x, y = pauli_matrices(n)
        w = np.exp(2j * np.pi / n)
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1
            assert np.allclose(x @ e, np.roll(e, 1))
            assert np.allclose(y @ e, w ** (j + 1) * e)  # basis e_1..e_n

    def test_roots(self):
        assert np.array_equal(root_of_unity_powers(4), [1, 1j, -1, -1j])

    def test_hand_built_n2(self):
        h = BlockMatrix(2, 1, np.array([[1, 2], [3, 4]], dtype=complex))
        assert np.array_equal(pauli_average(h), 5 * np.eye(2))
        assert np.allclose(pauli_average_explicit(h), 5 * np.eye(2), atol=0)

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32))
    def test_fast_matches_explicit(self, n, k, seed):
        h = BlockMatrix(n, k, random_complex(np.random.default_rng(seed), (n * k, n * k)))
        assert np.allclose(pauli_average(h), pauli_average_explicit(h), atol=1e-12)


class TestSuite:
    @pytest.mark.parametrize("n,k", [(2, 2), (3, 2), (2, 4), (4, 4)])
    def test_identity_is_exact(self, n, k):
        res = identity_suite(BlockMatrix(n, k, np.eye(n * k)))
        bad = [(name, r) for name, r in res if r != 0.0]
        assert not bad

    def test_random_non_hermitian(self, rng):
        h = BlockMatrix(3, 2, random_complex(rng, (6, 6)))
        for name, r in identity_suite(h):
            assert r <= 1e-10, name

    def test_names_cover_families(self, rng):
        names = {name for name, _ in identity_suite(BlockMatrix(2, 2, np.eye(4)))}
        for prefix in ("pauli", "phi-commute", "tr1-equals", "reshuffle-similarity",
                       "adjoint-tr1", "adjoint-tr2", "tensor-trace", "det-kron",
                       "compound-multiplicative", "symmetric-multiplicative",
                       "tensor-multiplicative"):
            assert any(n.startswith(prefix) for n in names), prefix

    def test_rejects_stack(self):
        with pytest.raises(ValueError):
            identity_suite(BlockMatrix(2, 2, np.zeros((3, 4, 4))))
