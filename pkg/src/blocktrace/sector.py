"""Cartesian decomposition and sector membership.

A matrix ``A`` lies in the sector of half-angle ``alpha`` when its numerical
range sits in ``{z : Re z > 0, |Im z| <= tan(alpha) Re z}``.  Membership is
decided through two Löwner conditions: ``Re A`` strictly positive definite
and ``tan(alpha) Re A ± Im A >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import UsageError

STRICT_PD = 1e-10


def cartesian(a) -> tuple[np.ndarray, np.ndarray]:
    """Return Hermitian ``(Re A, Im A)`` with ``A = Re A + i Im A``."""
    a = np.asarray(a, dtype=np.complex128)
    adj = linalg.dagger(a)
    return 0.5 * (a + adj), -0.5j * (a - adj)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha < math.pi / 2:
        raise UsageError(f"alpha must lie in [0, pi/2), got {alpha!r}")
    return alpha


def strictly_positive(eigs: np.ndarray) -> np.ndarray:
    """Strict positive definiteness from descending eigenvalues."""
    return eigs[..., -1] > STRICT_PD * np.maximum(1.0, eigs[..., 0])


def sector_margins(a, alpha: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pieces of the membership test, vectorised over stacks.

    Returns ``(re_eigs, minus_eigs, plus_eigs)``: descending eigenvalues of
    ``Re A``, ``tan(alpha) Re A - Im A`` and ``tan(alpha) Re A + Im A``.
    """
    re, im = cartesian(a)
    t = math.tan(_check_alpha(alpha))
    re_eigs = linalg.hermitian_eigs(re, check=False)
    minus = linalg.hermitian_eigs(t * re - im, check=False)
    plus = linalg.hermitian_eigs(t * re + im, check=False)
    return re_eigs, minus, plus


def sector_membership(a, alpha: float, tol: float = linalg.PSD_TOL):
    """Whether ``W(A)`` lies in the sector of half-angle ``alpha`` (at tolerance ``tol``)."""
    re_eigs, minus, plus = sector_margins(linalg.as_matrix(a), alpha)
    ok = (strictly_positive(re_eigs)
          & linalg.psd_margin(minus, tol)
          & linalg.psd_margin(plus, tol))
    return bool(ok) if np.ndim(ok) == 0 else ok


@dataclass(frozen=True)
class SectorReport:
    re_part: np.ndarray
    im_part: np.ndarray
    re_min_eig: float
    alpha_min: float  # math.inf when Re A is not positive definite

    @property
    def is_sector(self) -> bool:
        return math.isfinite(self.alpha_min)


def sector_angle(a) -> SectorReport:
    """Smallest half-angle of a sector containing ``W(A)``.

    With ``R = Re A`` positive definite, ``alpha_min = arctan rho`` where
    ``rho`` is the spectral radius of ``R^{-1/2} (Im A) R^{-1/2}``.
    """
    a = linalg.as_matrix(a, allow_stack=False)
    re, im = cartesian(a)
    w, v = np.linalg.eigh(re)
    re_min = float(w[0])
    if not re_min > STRICT_PD * max(1.0, float(w[-1])):
        return SectorReport(re, im, re_min, math.inf)
    r_inv_half = (v / np.sqrt(w)) @ linalg.dagger(v)
    reduced = r_inv_half @ im @ r_inv_half
    rho = float(np.max(np.abs(np.linalg.eigvalsh(linalg.hermitian_part(reduced)))))
    return SectorReport(re, im, re_min, math.atan(rho))
