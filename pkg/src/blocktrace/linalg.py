"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Every routine
here accepts a single square matrix of shape ``(N, N)`` or a stack of them
of shape ``(..., N, N)``; the fuzz loop relies on the stacked form to
evaluate a thousand trials with one LAPACK call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SizeError

KRON_CAP = 4096
PSD_TOL = 1e-9
HERMITIAN_TOL = 1e-12

JACOBI_THRESHOLD = 1e-13
JACOBI_MAX_SWEEPS = 60


def as_matrix(a, *, allow_stack: bool = True) -> np.ndarray:
    """Validate and convert ``a`` to a complex square matrix (or stack)."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2]:
        raise SizeError(f"expected a square matrix, got shape {arr.shape}")
    if not allow_stack and arr.ndim != 2:
        raise SizeError(f"expected a single matrix, got shape {arr.shape}")
    if arr.shape[-1] == 0:
        raise SizeError("matrix dimension must be positive")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix has non-finite entries")
    return arr


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose of the trailing two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def max_abs(a: np.ndarray) -> np.ndarray:
    """Entrywise max-norm, per matrix of a stack."""
    return np.max(np.abs(a), axis=(-2, -1))


def trace(a: np.ndarray) -> np.ndarray:
    return np.trace(a, axis1=-2, axis2=-1)


def kron(a, b, *, cap: int = KRON_CAP) -> np.ndarray:
    """Kronecker product ``a ⊗ b``, broadcasting over leading stack axes.

    Entry ``(i*s + l, j*s + m)`` of the result is ``a[i, j] * b[l, m]``
    with ``s = dim(b)``.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    m, s = a.shape[-1], b.shape[-1]
    if m * s > cap:
        raise SizeError(f"kron dimension {m * s} exceeds cap {cap}")
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    return out.reshape(out.shape[:-4] + (m * s, m * s))


class Determinant(NamedTuple):
    value: complex
    log_abs: float
    phase: complex


def det(a) -> Determinant:
    """Determinant via LU with partial pivoting (LAPACK ``getrf``).

    ``log_abs`` is the sum of ``log|pivot|`` and ``phase`` the unit-modulus
    sign, so ``value == phase * exp(log_abs)``.  A singular matrix yields
    ``value == 0``, ``log_abs == -inf`` and ``phase == 0``.
    """
    arr = np.asarray(a, dtype=np.complex128)
    phase, log_abs = np.linalg.slogdet(arr)
    with np.errstate(over="ignore", under="ignore"):
        value = phase * np.exp(log_abs)
    if arr.ndim == 2:
        return Determinant(complex(value), float(log_abs), complex(phase))
    return Determinant(value, log_abs, phase)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return the symmetrized ``(a + a*)/2``; raise if ``a`` is far from Hermitian."""
    skew = max_abs(a - dagger(a))
    scale = np.maximum(max_abs(a), np.finfo(float).tiny)
    if np.any(skew > tol * scale):
        worst = float(np.max(skew / scale))
        raise DomainError(f"input not Hermitian (relative skew {worst:.3e} > {tol:g})")
    return hermitian_part(a)


def jacobi_eigh(a, *, threshold: float = JACOBI_THRESHOLD,
                max_sweeps: int = JACOBI_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for one complex Hermitian matrix.

    Returns ``(w, v)`` with ``w`` sorted descending and ``a ≈ v diag(w) v*``.
    Each rotation first removes the phase of the pivot entry with a diagonal
    unitary, then applies the real symmetric Jacobi rotation.
    """
    a = hermitian_part(as_matrix(a, allow_stack=False)).copy()
    n = a.shape[0]
    v = identity(n)
    stop = threshold * max(float(max_abs(a)), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a)))
        if off.max(initial=0.0) <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= stop * 1e-3:
                    continue
                w = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                rot = np.array([[c, s], [-s * np.conj(w), c * np.conj(w)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = dagger(rot) @ a[idx, :]
                v[:, idx] = v[:, idx] @ rot
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    w = np.diag(a).real
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigs(a, *, method: str = "lapack", check: bool = True) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix (or stack), sorted descending.

    ``method="lapack"`` uses ``numpy.linalg.eigvalsh`` and works on stacks;
    ``method="jacobi"`` runs the in-repo cyclic Jacobi solver on a single
    matrix.
    """
    arr = as_matrix(a)
    sym = check_hermitian(arr) if check else hermitian_part(arr)
    if method == "jacobi":
        if sym.ndim != 2:
            return np.stack([jacobi_eigh(m)[0] for m in sym.reshape(-1, *sym.shape[-2:])]
                            ).reshape(sym.shape[:-1])
        return jacobi_eigh(sym)[0]
    if method != "lapack":
        raise ValueError(f"unknown eigen method {method!r}")
    return np.linalg.eigvalsh(sym)[..., ::-1]


@dataclass(frozen=True)
class PsdVerdict:
    """Positive semidefiniteness verdict.

    ``is_psd`` holds iff ``min_eig >= -tol_used * max(1, max_eig)``.  Stacked
    inputs give array-valued fields.
    """

    is_psd: bool
    min_eig: float
    max_eig: float
    tol_used: float

    def to_dict(self) -> dict:
        return {
            "is_psd": bool(self.is_psd),
            "min_eig": float(self.min_eig),
            "max_eig": float(self.max_eig),
            "tol_used": float(self.tol_used),
        }


def psd_margin(eigs: np.ndarray, tol: float) -> np.ndarray:
    """Boolean PSD verdict from descending eigenvalues (last axis)."""
    return eigs[..., -1] >= -tol * np.maximum(1.0, eigs[..., 0])


def psd_test(a, tol: float = PSD_TOL, *, check: bool = True) -> PsdVerdict:
    eigs = hermitian_eigs(a, check=check)
    ok = psd_margin(eigs, tol)
    if eigs.ndim == 1:
        return PsdVerdict(bool(ok), float(eigs[-1]), float(eigs[0]), tol)
    return PsdVerdict(ok, eigs[..., -1], eigs[..., 0], tol)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``tr(a* b)``, conjugate-linear in ``a``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape[-2:] != b.shape[-2:]:
        raise SizeError(f"dimension mismatch {a.shape[-2:]} vs {b.shape[-2:]}")
    out = np.sum(np.conj(a) * b, axis=(-2, -1))
    return complex(out) if out.ndim == 0 else out


def singular_values(a) -> np.ndarray:
    """Singular values, descending, as square roots of eigenvalues of ``a* a``."""
    arr = np.asarray(a, dtype=np.complex128)
    gram = dagger(arr) @ arr
    eigs = np.linalg.eigvalsh(hermitian_part(gram))[..., ::-1]
    return np.sqrt(np.clip(eigs, 0.0, None))


def sqrtm_psd(a: np.ndarray, *, inverse: bool = False) -> np.ndarray:
    """Square root (or inverse square root) of a Hermitian PSD matrix by eigendecomposition."""
    w, v = np.linalg.eigh(hermitian_part(np.asarray(a, dtype=np.complex128)))
    w = np.clip(w, 0.0, None)
    d = 1.0 / np.sqrt(w) if inverse else np.sqrt(w)
    return (v * d[..., None, :]) @ dagger(v)
