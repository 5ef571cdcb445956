"""Spectral functionals and induced operator powers.

``elem_sym`` and ``complete_sym`` are the elementary and complete
homogeneous symmetric functions of the eigenvalues.  ``compound_power``,
``symmetric_power`` and ``tensor_power`` build the antisymmetric, symmetric
and full tensor powers, whose traces are ``e_t``, ``s_t`` and ``(tr X)^r``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations

import numpy as np

from . import linalg
from .errors import SizeError, UsageError

POWER_CAP = 512


def _check_order(t, lo: int, hi: int | None, name: str = "t") -> int:
    if not isinstance(t, (int, np.integer)) or isinstance(t, bool):
        raise UsageError(f"{name} must be an integer, got {t!r}")
    if t < lo or (hi is not None and t > hi):
        bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise UsageError(f"{name}={t} out of range {bound}")
    return int(t)


def char_poly_coeffs(eigs: np.ndarray) -> np.ndarray:
    """Coefficients ``c_0..c_N`` of ``prod_i (z + lambda_i) = sum_t c_t z^{N-t}``.

    ``c_t`` is ``e_t`` of the eigenvalues; this is the monic characteristic
    polynomial of ``-X`` with sign-corrected coefficients.
    """
    eigs = np.asarray(eigs)
    n = eigs.shape[-1]
    c = np.zeros(eigs.shape[:-1] + (n + 1,), dtype=eigs.dtype)
    c[..., 0] = 1
    for j in range(n):
        lam = eigs[..., j:j + 1]
        c[..., 1:j + 2] = c[..., 1:j + 2] + lam * c[..., 0:j + 1]
    return c


def power_traces(x: np.ndarray, upto: int) -> np.ndarray:
    """``[tr x, tr x^2, ..., tr x^upto]`` along a new last axis."""
    out = []
    p = x
    for j in range(upto):
        if j:
            p = p @ x
        out.append(linalg.trace(p))
    return np.stack(out, axis=-1)


def elem_sym(x, t: int, *, hermitian: bool = True):
    """``e_t`` of the eigenvalues of ``x``.

    Hermitian input (the default) is symmetrized and ``e_t`` read off the
    characteristic polynomial built from its real eigenvalues.  With
    ``hermitian=False`` any square matrix is accepted and ``e_t`` comes from
    Newton's identities on the power traces ``tr x^j``; the result is then
    complex.
    """
    x = linalg.as_matrix(x)
    t = _check_order(t, 1, x.shape[-1])
    if hermitian:
        eigs = linalg.hermitian_eigs(x)
        val = char_poly_coeffs(eigs)[..., t]
        return float(val) if np.ndim(val) == 0 else val
    p = power_traces(x, t)
    e = [np.ones(x.shape[:-2], dtype=np.complex128)]
    for m in range(1, t + 1):
        acc = sum((-1) ** (j - 1) * e[m - j] * p[..., j - 1] for j in range(1, m + 1))
        e.append(acc / m)
    val = e[t]
    return complex(val) if np.ndim(val) == 0 else val


def complete_sym(x, t: int, *, hermitian: bool = True):
    """``s_t`` of the eigenvalues of ``x`` via ``h_t = (1/t) sum_j p_j h_{t-j}``.

    ``p_j = tr x^j``.  Hermitian input gives a real result; ``hermitian=False``
    accepts any square matrix and returns a complex value.
    """
    x = linalg.as_matrix(x)
    t = _check_order(t, 1, None)
    if hermitian:
        x = linalg.check_hermitian(x)
    p = power_traces(x, t)
    h = [np.ones(x.shape[:-2], dtype=np.complex128)]
    for m in range(1, t + 1):
        acc = sum(p[..., j - 1] * h[m - j] for j in range(1, m + 1))
        h.append(acc / m)
    val = h[t].real if hermitian else h[t]
    if np.ndim(val) == 0:
        return float(val) if hermitian else complex(val)
    return val


def tensor_power(x, r: int, *, cap: int = POWER_CAP) -> np.ndarray:
    """``x ⊗ x ⊗ ... ⊗ x`` (``r`` factors)."""
    x = linalg.as_matrix(x)
    r = _check_order(r, 1, None, "r")
    d = x.shape[-1]
    if d ** r > cap:
        raise SizeError(f"tensor power dimension {d}^{r} exceeds cap {cap}")
    out = x
    for _ in range(r - 1):
        out = linalg.kron(out, x, cap=cap)
    return out


@lru_cache(maxsize=None)
def subsets(d: int, t: int) -> np.ndarray:
    """Size-``t`` subsets of ``range(d)`` in lexicographic order, shape ``(C, t)``."""
    return np.array(list(combinations(range(d), t)), dtype=np.intp).reshape(-1, t)


def compound_power(x, t: int, *, cap: int = POWER_CAP) -> np.ndarray:
    """The ``t``-th compound: entry ``(I, J)`` is ``det x[I, J]`` over ordered subsets."""
    x = linalg.as_matrix(x)
    d = x.shape[-1]
    t = _check_order(t, 1, d)
    idx = subsets(d, t)
    if len(idx) > cap:
        raise SizeError(f"compound dimension {len(idx)} exceeds cap {cap}")
    rows = idx[:, None, :, None]
    cols = idx[None, :, None, :]
    minors = x[..., rows, cols]
    return np.linalg.det(minors)


def principal_minor_sums(x, t: int):
    """``tr`` of the ``t``-th compound (sum of principal ``t``-minors); any square input."""
    x = linalg.as_matrix(x)
    t = _check_order(t, 1, x.shape[-1])
    idx = subsets(x.shape[-1], t)
    val = np.sum(np.linalg.det(x[..., idx[:, :, None], idx[:, None, :]]), axis=-1)
    return complex(val) if np.ndim(val) == 0 else val


@lru_cache(maxsize=None)
def multisets(d: int, t: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations_with_replacement(range(d), t))


@lru_cache(maxsize=None)
def _multiset_indicator(d: int, t: int) -> tuple[np.ndarray, np.ndarray]:
    """0/1 matrix whose column ``c`` sums the orderings of multiset ``c``, and the counts."""
    ms = multisets(d, t)
    ind = np.zeros((d ** t, len(ms)))
    counts = np.zeros(len(ms))
    weights = d ** np.arange(t - 1, -1, -1)
    for c, m in enumerate(ms):
        orders = set(permutations(m))
        for o in orders:
            ind[int(np.dot(o, weights)), c] = 1.0
        counts[c] = len(orders)
    ind.setflags(write=False)
    counts.setflags(write=False)
    return ind, counts


def symmetrizer_basis(d: int, t: int) -> np.ndarray:
    """Orthonormal basis of the symmetric subspace of ``(C^d)^{⊗t}``, shape ``(d^t, C)``.

    Column ``c`` is the normalized sum of ``e_{i_1} ⊗ ... ⊗ e_{i_t}`` over all
    distinct orderings of the ``c``-th multiset in lexicographic order.
    """
    ind, counts = _multiset_indicator(d, t)
    return ind / np.sqrt(counts)


def symmetric_power(x, t: int, *, cap: int = POWER_CAP) -> np.ndarray:
    """Restriction of ``⊗^t x`` to the symmetric subspace, in the multiset basis."""
    x = linalg.as_matrix(x)
    t = _check_order(t, 1, None)
    d = x.shape[-1]
    if math.comb(d + t - 1, t) > cap:
        raise SizeError(f"symmetric power dimension {math.comb(d + t - 1, t)} exceeds cap {cap}")
    ind, counts = _multiset_indicator(d, t)
    full = tensor_power(x, t, cap=linalg.KRON_CAP)
    # dividing by sqrt(c_a c_b) keeps the diagonal exact for diagonal integer input
    return (ind.T @ full @ ind) / np.sqrt(np.outer(counts, counts))


SCHATTEN_ORDERS = (1, 2, 3, math.inf)


def parse_q(q) -> float:
    if isinstance(q, str):
        q = q.strip().lower()
        q = math.inf if q in ("inf", "infinity", "∞") else q
    try:
        qf = float(q)
    except (TypeError, ValueError):
        raise UsageError(f"unsupported Schatten order {q!r}") from None
    if qf not in SCHATTEN_ORDERS:
        raise UsageError(f"Schatten order must be one of 1, 2, 3, inf; got {q!r}")
    return qf


def schatten_from_singular(sv: np.ndarray, q: float) -> np.ndarray:
    if q == math.inf:
        return sv[..., 0]
    return np.sum(sv ** q, axis=-1) ** (1.0 / q)


def schatten_norm(x, q) -> float:
    """Schatten ``q``-norm for ``q`` in ``{1, 2, 3, inf}``."""
    q = parse_q(q)
    sv = linalg.singular_values(linalg.as_matrix(x))
    val = schatten_from_singular(sv, q)
    return float(val) if np.ndim(val) == 0 else val
