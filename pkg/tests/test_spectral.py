import math
from itertools import combinations, combinations_with_replacement, permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from blocktrace import linalg, spectral
from blocktrace.errors import SizeError, UsageError

from conftest import random_complex, random_hermitian


def e_brute(eigs, t):
    return sum(np.prod(c) for c in combinations(eigs, t))


def s_brute(eigs, t):
    return sum(np.prod(c) for c in combinations_with_replacement(eigs, t))


def permanent(m):
    d = m.shape[0]
    return sum(np.prod([m[i, p[i]] for i in range(d)]) for p in permutations(range(d)))


def multiplicity(ms):
    out = 1
    for v in set(ms):
        out *= math.factorial(ms.count(v))
    return out


class TestSymmetricFunctions:
    def test_e2_diag(self):
        assert spectral.elem_sym(np.diag([1.0, 2.0, 3.0]), 2) == pytest.approx(11.0)

    def test_s2_diag(self):
        assert spectral.complete_sym(np.diag([1.0, 2.0]), 2) == pytest.approx(7.0)
        assert spectral.complete_sym(np.eye(2), 2) == pytest.approx(3.0)

    @given(st.integers(1, 6), st.data())
    def test_elem_matches_subsets(self, d, data):
        t = data.draw(st.integers(1, d))
        h = random_hermitian(np.random.default_rng(data.draw(st.integers(0, 2**32))), d)
        want = e_brute(np.linalg.eigvalsh(h), t)
        assert spectral.elem_sym(h, t) == pytest.approx(want, rel=1e-8, abs=1e-8)

    @given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 2**32))
    def test_complete_matches_multisets(self, d, t, seed):
        h = random_hermitian(np.random.default_rng(seed), d)
        want = s_brute(np.linalg.eigvalsh(h), t)
        assert spectral.complete_sym(h, t) == pytest.approx(want, rel=1e-8, abs=1e-8)

    def test_top_coefficient_is_det(self, rng):
        h = random_hermitian(rng, 5)
        assert spectral.elem_sym(h, 5) == pytest.approx(np.linalg.det(h).real, rel=1e-9)

    def test_non_hermitian(self, rng):
        x = random_complex(rng, (4, 4))
        eigs = np.linalg.eigvals(x)
        for t in (1, 2, 3):
            assert spectral.elem_sym(x, t, hermitian=False) == pytest.approx(e_brute(eigs, t))
            assert spectral.complete_sym(x, t, hermitian=False) == pytest.approx(s_brute(eigs, t))
            assert spectral.principal_minor_sums(x, t) == pytest.approx(e_brute(eigs, t))

    def test_order_range(self):
        with pytest.raises(UsageError):
            spectral.elem_sym(np.eye(2), 3)
        with pytest.raises(UsageError):
            spectral.complete_sym(np.eye(2), 0)

    def test_batched(self, rng):
        stack = np.stack([random_hermitian(rng, 3) for _ in range(4)])
        got = spectral.elem_sym(stack, 2)
        for i in range(4):
            assert got[i] == pytest.approx(spectral.elem_sym(stack[i], 2))


class TestPowers:
    def test_compound_diag(self):
        c = spectral.compound_power(np.diag([1.0, 2.0, 3.0]), 2)
        assert np.allclose(c, np.diag([2.0, 3.0, 6.0]))

    def test_symmetric_diag(self):
        s = spectral.symmetric_power(np.diag([1.0, 2.0]), 2)
        assert np.allclose(s, np.diag([1.0, 2.0, 4.0]))

    @pytest.mark.parametrize("t", [1, 2, 3])
    def test_traces(self, rng, t):
        h = random_hermitian(rng, 4)
        assert np.trace(spectral.compound_power(h, t)).real == pytest.approx(
            spectral.elem_sym(h, t), rel=1e-9, abs=1e-9)
        assert np.trace(spectral.symmetric_power(h, t)).real == pytest.approx(
            spectral.complete_sym(h, t), rel=1e-9, abs=1e-9)
        assert np.trace(spectral.tensor_power(h, t)) == pytest.approx(np.trace(h) ** t)

    def test_symmetric_power_permanent_oracle(self, rng):
        # <e_I, V^t(X) e_J> = per(X[I, J]) / sqrt(mu(I) mu(J))
        x = random_complex(rng, (3, 3))
        s = spectral.symmetric_power(x, 2)
        ms = spectral.multisets(3, 2)
        for a, mi in enumerate(ms):
            for b, mj in enumerate(ms):
                sub = x[np.ix_(mi, mj)]
                want = permanent(sub) / math.sqrt(multiplicity(mi) * multiplicity(mj))
                assert s[a, b] == pytest.approx(want)

    @given(st.integers(2, 4), st.integers(1, 2), st.integers(0, 2**32))
    def test_multiplicative(self, d, t, seed):
        rng = np.random.default_rng(seed)
        x, y = random_complex(rng, (d, d)), random_complex(rng, (d, d))
        for f in (spectral.compound_power, spectral.symmetric_power, spectral.tensor_power):
            assert np.allclose(f(x @ y, t), f(x, t) @ f(y, t), atol=1e-9)

    def test_caps(self):
        with pytest.raises(SizeError):
            spectral.tensor_power(np.eye(8), 4)
        with pytest.raises(SizeError):
            spectral.compound_power(np.eye(20), 10)


class TestSchatten:
    def test_orders(self, rng):
        x = random_complex(rng, (4, 4))
        sv = np.linalg.svd(x, compute_uv=False)
        assert spectral.schatten_norm(x, 1) == pytest.approx(sv.sum())
        assert spectral.schatten_norm(x, 2) == pytest.approx(np.linalg.norm(x))
        assert spectral.schatten_norm(x, 3) == pytest.approx((sv ** 3).sum() ** (1 / 3))
        assert spectral.schatten_norm(x, "inf") == pytest.approx(sv.max())

    def test_rejects_other_orders(self):
        with pytest.raises(UsageError):
            spectral.schatten_norm(np.eye(2), 4)
        with pytest.raises(UsageError):
            spectral.parse_q("two")
