"""Exact identities that hold for every input, with max-norm residuals.

Residuals are relative: ``max|L - R| / max(1, max|L|, max|R|)``.  On
``H = I`` every identity is evaluated without rounding, so all residuals
are exactly zero there.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from .. import blockops, linalg, spectral
from ..blockops import BlockMatrix


def root_of_unity_powers(n: int) -> np.ndarray:
    """``omega^m`` for ``m = 0..n-1`` with ``omega = exp(2 pi i / n)``.

    Quarter turns are written exactly so that ``n = 2`` gives ``[1, -1]``.
    """
    out = np.empty(n, dtype=np.complex128)
    exact = {0: 1.0, 1: 1j, 2: -1.0, 3: -1j}
    for m in range(n):
        if (4 * m) % n == 0:
            out[m] = exact[4 * m // n]
        else:
            theta = 2.0 * math.pi * m / n
            out[m] = complex(math.cos(theta), math.sin(theta))
    return out


def pauli_matrices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Shift ``X e_j = e_{j+1}`` and clock ``Y e_j = omega^j e_j`` (``j = 1..n``, cyclic)."""
    x = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        x[(j + 1) % n, j] = 1.0
    y = np.diag(root_of_unity_powers(n)[np.arange(1, n + 1) % n])
    return x, y


def pauli_average(h: BlockMatrix) -> np.ndarray:
    """``(1/n) sum_{l,j} U H U*`` with ``U = X^l Y^j (x) I_k``.

    Conjugation by the clock multiplies block ``(a, b)`` by ``omega^{j(a-b)}``
    and conjugation by the shift permutes blocks cyclically, so no matrix
    products are formed.
    """
    n = h.n
    t = h.tensor
    roots = root_of_unity_powers(n)
    diff = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    clocked = sum(roots[(j * diff) % n][:, None, :, None] * t for j in range(n))
    total = sum(np.roll(clocked, s, axis=(-4, -2)) for s in range(n))
    return (total / n).reshape(h.mat.shape)


def pauli_average_explicit(h: BlockMatrix) -> np.ndarray:
    """Same average computed with explicit unitary products (reference)."""
    x, y = pauli_matrices(h.n)
    eye = linalg.identity(h.k)
    total = np.zeros_like(h.mat)
    for l in range(h.n):
        for j in range(h.n):
            u = linalg.kron(np.linalg.matrix_power(x, l) @ np.linalg.matrix_power(y, j), eye)
            total = total + u @ h.mat @ linalg.dagger(u)
    return total / h.n


def relative_residual(left, right) -> float:
    left = np.asarray(left)
    right = np.asarray(right)
    scale = max(1.0, float(np.max(np.abs(left), initial=0.0)),
                float(np.max(np.abs(right), initial=0.0)))
    return float(np.max(np.abs(left - right), initial=0.0)) / scale


def _adjoint_matrix(h: BlockMatrix, axis: int) -> np.ndarray:
    """Matrix of ``<E_lm, tr_axis H>`` computed as ``<embed(E_lm), H>``."""
    d = h.k if axis == 1 else h.n
    out = np.empty((d, d), dtype=np.complex128)
    for l in range(d):
        for m in range(d):
            e = np.zeros((d, d), dtype=np.complex128)
            e[l, m] = 1.0
            out[l, m] = linalg.hs_inner(blockops.embed(e, h.n, h.k, axis), h.mat)
    return out


def identity_suite(h: BlockMatrix) -> list[tuple[str, float]]:
    """Residuals of every structural identity on a single matrix ``h``."""
    if h.mat.ndim != 2:
        raise ValueError("identity_suite takes a single matrix")
    n, k, dim = h.n, h.k, h.dim
    tr1 = blockops.partial_trace(h, 1)
    tr2 = blockops.partial_trace(h, 2)
    out = [("pauli-average", relative_residual(pauli_average(h),
                                               linalg.kron(linalg.identity(n), tr1)))]
    for s1 in "+-":
        for s2 in "+-":
            a = blockops.phi_map(blockops.phi_map(h, 2, s2), 1, s1).mat
            b = blockops.phi_map(blockops.phi_map(h, 1, s1), 2, s2).mat
            out.append((f"phi-commute{s1}{s2}", relative_residual(a, b)))
    shuffled = blockops.reshuffle(h)
    out.append(("tr1-equals-tr2-of-reshuffle",
                relative_residual(tr1, blockops.partial_trace(shuffled, 2))))
    s = blockops.shuffle_matrix(n, k)
    out.append(("reshuffle-similarity", relative_residual(s @ h.mat @ s.T, shuffled.mat)))
    out.append(("reshuffle-inverse",
                relative_residual(s.T @ shuffled.mat @ s, h.mat)))
    out.append(("adjoint-tr1", relative_residual(_adjoint_matrix(h, 1), tr1)))
    out.append(("adjoint-tr2", relative_residual(_adjoint_matrix(h, 2), tr2)))

    tr = complex(linalg.trace(h.mat))
    for r in (1, 2, 3):
        if dim ** r > spectral.POWER_CAP:
            break
        tp = linalg.trace(spectral.tensor_power(h.mat, r))
        out.append((f"tensor-trace-r{r}", relative_residual(tp, tr ** r)))

    # LU-product determinants: exact on diagonal integer input, unlike sign * exp(logdet)
    lhs = scipy.linalg.det(linalg.kron(tr2, tr1))
    rhs = scipy.linalg.det(tr2) ** k * scipy.linalg.det(tr1) ** n
    out.append(("det-kron-factorization", relative_residual(lhs, rhs)))

    x, y = h.mat, linalg.dagger(h.mat)
    xy = x @ y
    for t in (1, 2, 3):
        if t <= dim and math.comb(dim, t) <= spectral.POWER_CAP:
            out.append((f"compound-multiplicative-t{t}", relative_residual(
                spectral.compound_power(xy, t),
                spectral.compound_power(x, t) @ spectral.compound_power(y, t))))
        if dim ** t <= spectral.POWER_CAP:
            out.append((f"symmetric-multiplicative-t{t}", relative_residual(
                spectral.symmetric_power(xy, t),
                spectral.symmetric_power(x, t) @ spectral.symmetric_power(y, t))))
            out.append((f"tensor-multiplicative-r{t}", relative_residual(
                spectral.tensor_power(xy, t),
                spectral.tensor_power(x, t) @ spectral.tensor_power(y, t))))
    return out
