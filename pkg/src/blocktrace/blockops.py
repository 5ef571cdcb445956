"""Block structure on ``M_n(M_k)``: partial traces, partial transpose,
reshuffle, partial determinants, the PPT test and the four Φ-maps.

Indices are 0-based: block ``(i, j)`` occupies rows ``i*k .. i*k+k-1`` and
columns ``j*k .. j*k+k-1``.  Within-block entry ``(l, m)`` of block
``(i, j)`` sits at ``(i*k + l, j*k + m)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .errors import SizeError, UsageError
from .linalg import PsdVerdict


@dataclass(frozen=True)
class BlockMatrix:
    """A matrix of order ``n*k`` viewed as ``n x n`` blocks of order ``k``.

    ``mat`` may carry leading stack axes; all block operations act on the
    trailing two axes.
    """

    n: int
    k: int
    mat: np.ndarray

    def __post_init__(self):
        if int(self.n) < 1 or int(self.k) < 1:
            raise SizeError(f"block dims must be positive, got n={self.n}, k={self.k}")
        mat = linalg.as_matrix(self.mat)
        if mat.shape[-1] != self.n * self.k:
            raise SizeError(
                f"matrix order {mat.shape[-1]} does not equal n*k = {self.n * self.k}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.n * self.k

    @property
    def tensor(self) -> np.ndarray:
        """View with axes ``(..., i, l, j, m)`` for entry ``h^{i,j}_{l,m}``."""
        return self.mat.reshape(self.mat.shape[:-2] + (self.n, self.k, self.n, self.k))

    def block(self, i: int, j: int) -> np.ndarray:
        k = self.k
        return self.mat[..., i * k:(i + 1) * k, j * k:(j + 1) * k]

    def with_mat(self, mat) -> "BlockMatrix":
        return BlockMatrix(self.n, self.k, mat)

    def __getitem__(self, idx) -> "BlockMatrix":
        """Select from the stack axes."""
        return BlockMatrix(self.n, self.k, self.mat[idx])


def _check_axis(axis) -> int:
    if axis not in (1, 2):
        raise UsageError(f"axis must be 1 or 2, got {axis!r}")
    return axis


def partial_trace(h: BlockMatrix, axis: int) -> np.ndarray:
    """``axis=1``: sum of diagonal blocks (order k).  ``axis=2``: matrix of block traces (order n)."""
    t = h.tensor
    if _check_axis(axis) == 1:
        return np.einsum("...ilim->...lm", t)
    return np.einsum("...iljl->...ij", t)


def partial_transpose(h: BlockMatrix) -> BlockMatrix:
    """Swap block ``(i, j)`` with block ``(j, i)``; block interiors are untouched."""
    t = np.swapaxes(h.tensor, -4, -2)
    return h.with_mat(t.reshape(h.mat.shape))


def full_transpose(h: BlockMatrix) -> BlockMatrix:
    return h.with_mat(np.swapaxes(h.mat, -1, -2))


@lru_cache(maxsize=None)
def shuffle_permutation(n: int, k: int) -> np.ndarray:
    """Index map of the perfect shuffle: ``perm[l*n + i] = i*k + l``.

    Row ``a`` of the reshuffled matrix is row ``perm[a]`` of the original,
    so ``reshuffle(H) = S H S^T`` with ``S[a, perm[a]] = 1``.
    """
    i, l = np.meshgrid(np.arange(n), np.arange(k), indexing="xy")
    perm = (i * k + l).reshape(-1)
    perm.setflags(write=False)
    return perm


def shuffle_matrix(n: int, k: int) -> np.ndarray:
    perm = shuffle_permutation(n, k)
    s = np.zeros((n * k, n * k))
    s[np.arange(n * k), perm] = 1.0
    return s


def reshuffle(h: BlockMatrix) -> BlockMatrix:
    """Rearrange ``H in M_n(M_k)`` into ``H~ = [G_{l,m}] in M_k(M_n)`` with
    ``G_{l,m} = [h^{i,j}_{l,m}]_{i,j}``; a permutation similarity of ``H``."""
    perm = shuffle_permutation(h.n, h.k)
    return BlockMatrix(h.k, h.n, h.mat[..., perm[:, None], perm[None, :]])


def block_dets(h: BlockMatrix) -> linalg.Determinant:
    """Determinants of all ``n*n`` blocks, as arrays of shape ``(..., n, n)``."""
    blocks = np.swapaxes(h.tensor, -3, -2)
    return linalg.det(blocks)


def partial_det(h: BlockMatrix, axis: int) -> np.ndarray:
    """``axis=2``: ``[det H_{i,j}]`` (order n).  ``axis=1``: ``[det G_{l,m}]`` (order k)."""
    if _check_axis(axis) == 1:
        return partial_det(reshuffle(h), 2)
    return np.asarray(block_dets(h).value, dtype=np.complex128)


@dataclass(frozen=True)
class PptVerdict:
    psd: PsdVerdict
    psd_tau: PsdVerdict

    @property
    def ppt(self):
        return np.logical_and(self.psd.is_psd, self.psd_tau.is_psd)

    def to_dict(self) -> dict:
        return {"ppt": bool(self.ppt), "psd": self.psd.to_dict(),
                "psd_tau": self.psd_tau.to_dict()}


def ppt_test(h: BlockMatrix, tol: float = linalg.PSD_TOL) -> PptVerdict:
    return PptVerdict(linalg.psd_test(h.mat, tol),
                      linalg.psd_test(partial_transpose(h).mat, tol))


def phi_map(x: BlockMatrix, axis: int, sign: str) -> BlockMatrix:
    """The maps ``Φ_2^±(X) = (tr_2 X^τ) ⊗ I_k ± X^τ`` and
    ``Φ_1^±(X) = I_n ⊗ (tr_1 X^τ) ± X^τ``.

    ``sign`` is ``"+"`` or ``"-"``.  Defined for arbitrary (non-Hermitian)
    input; linear in ``x``.
    """
    if sign not in ("+", "-"):
        raise UsageError(f"sign must be '+' or '-', got {sign!r}")
    xt = partial_transpose(x)
    if _check_axis(axis) == 2:
        base = linalg.kron(partial_trace(xt, 2), linalg.identity(x.k))
    else:
        base = linalg.kron(linalg.identity(x.n), partial_trace(xt, 1))
    out = base + xt.mat if sign == "+" else base - xt.mat
    return x.with_mat(out)


def embed(y: np.ndarray, n: int, k: int, axis: int) -> np.ndarray:
    """Adjoint of ``partial_trace``: ``axis=1`` gives ``I_n ⊗ y``, ``axis=2`` gives ``y ⊗ I_k``."""
    if _check_axis(axis) == 1:
        return linalg.kron(linalg.identity(n), y)
    return linalg.kron(y, linalg.identity(k))
