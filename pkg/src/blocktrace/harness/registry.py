"""The inequality registry.

Each entry evaluates one statement on a stack of block matrices
``H in M_n(M_k)`` and returns one :class:`Part` per inequality in the
statement.  ``lhs`` is always the side claimed to be larger.

Scalar determinant inequalities are evaluated on logarithms of their
nonnegative terms (see :func:`outcome.from_logs`); every scalar entry is
homogeneous of the declared ``degree``, so inputs are rescaled to a fixed
trace before evaluation without changing the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .. import blockops, linalg, sector, spectral
from ..blockops import BlockMatrix
from ..errors import DomainError, UsageError
from . import outcome
from .outcome import CheckOutcome, Part, from_logs, loewner, scalar

HYPOTHESES = ("psd", "sector", "general")
ACCEPTED_CLASSES = {
    "psd": ("psd", "ppt", "density"),
    "sector": ("sector",),
    "general": ("psd", "ppt", "sector", "density", "hermitian", "general"),
}
PARAM_VALUES = {"q": (1, 2, 3, math.inf), "r": (1, 2, 3), "t": (1, 2, 3)}


@dataclass(frozen=True)
class InequalityCase:
    id: str
    hypothesis: str
    statement: str
    evaluate: Callable[..., dict]
    degree: object = None
    params: tuple = ()
    requires: Callable[[int, int], str | None] | None = None
    prepare: Callable[[BlockMatrix], BlockMatrix] | None = None
    notes: str = ""

    def reason_inapplicable(self, n: int, k: int) -> str | None:
        return self.requires(n, k) if self.requires else None

    def grid(self, n: int, k: int) -> list[dict]:
        """Default parameter cells (excluding ``alpha``) for block dims ``(n, k)``."""
        cells = [{}]
        for name in self.params:
            if name == "alpha":
                continue
            values = PARAM_VALUES[name]
            if name == "t":
                values = tuple(t for t in values if t <= k)
            cells = [dict(c, **{name: v}) for c in cells for v in values]
        return cells


REGISTRY: dict[str, InequalityCase] = {}


def register(case_id: str, *, hypothesis: str, statement: str, degree=None,
             params: tuple = (), requires=None, prepare=None, notes: str = ""):
    if hypothesis not in HYPOTHESES:
        raise ValueError(hypothesis)
    if hypothesis == "sector":
        params = ("alpha",) + tuple(params)

    def deco(fn):
        if case_id in REGISTRY:
            raise ValueError(f"duplicate registry id {case_id}")
        REGISTRY[case_id] = InequalityCase(case_id, hypothesis, statement, fn, degree,
                                           tuple(params), requires, prepare, notes)
        return fn
    return deco


def get_case(case_id: str) -> InequalityCase:
    try:
        return REGISTRY[case_id]
    except KeyError:
        raise UsageError(f"unknown inequality id {case_id!r}") from None


def case_ids() -> list[str]:
    return sorted(REGISTRY)


def _needs_n(value: int):
    def check(n, k):
        return None if n == value else f"requires n = {value} diagonal blocks, got n = {n}"
    return check


def _needs_n_at_least(value: int):
    def check(n, k):
        return None if n >= value else f"requires n >= {value} diagonal blocks, got n = {n}"
    return check


# ---------------------------------------------------------------------------
# shared quantities

def logdet_psd(m: np.ndarray) -> np.ndarray:
    """``log det`` of PSD matrices; a nonpositive computed determinant maps to ``-inf``."""
    sign, log_abs = np.linalg.slogdet(m)
    return np.where(sign.real > 0, log_abs, -np.inf)


def logabsdet(m: np.ndarray) -> np.ndarray:
    return np.linalg.slogdet(m)[1]


def _log(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), -np.inf)


class Quantities:
    """Lazily computed functionals of a stack ``H``; shared by the evaluators."""

    def __init__(self, h: BlockMatrix, params: dict):
        self.h = h
        self.n, self.k = h.n, h.k
        self.dim = h.n * h.k
        self.params = params

    @property
    def mat(self):
        return self.h.mat

    @cached_property
    def tr1(self):
        return blockops.partial_trace(self.h, 1)

    @cached_property
    def tr2(self):
        return blockops.partial_trace(self.h, 2)

    @cached_property
    def trace(self):
        return linalg.trace(self.mat)

    @cached_property
    def diag_blocks(self):
        return [self.h.block(i, i) for i in range(self.n)]

    @cached_property
    def reshuffled_diag_blocks(self):
        hr = blockops.reshuffle(self.h)
        return [hr.block(l, l) for l in range(self.k)]

    @cached_property
    def singular_values(self):
        return linalg.singular_values(self.mat)

    @property
    def log_cos(self) -> float:
        return math.log(math.cos(self.params["alpha"]))

    def eye_n_kron(self, m):
        return linalg.kron(linalg.identity(self.n), m)

    def kron_eye_k(self, m):
        return linalg.kron(m, linalg.identity(self.k))

    def scalar_eye(self, c):
        return np.asarray(c)[..., None, None] * linalg.identity(self.dim)

    def two_by_two(self):
        return self.h.block(0, 0), self.h.block(0, 1), self.h.block(1, 1)


# ---------------------------------------------------------------------------
# sector preliminaries and Fischer

@register("fischer", hypothesis="psd", degree="nk",
          statement="det H <= prod_i det H_ii")
def _fischer(q: Quantities):
    lhs = sum(logdet_psd(b) for b in q.diag_blocks)
    return {"fischer": from_logs([lhs], [logdet_psd(q.mat)])}


@register("lin15-sector-det", hypothesis="sector", degree="nk",
          statement="|det A| <= sec(alpha)^dim det(Re A)")
def _lin15(q: Quantities):
    re, _ = sector.cartesian(q.mat)
    lhs = -q.dim * q.log_cos + logdet_psd(re)
    return {"sector-det": from_logs([lhs], [logabsdet(q.mat)])}


@register("rotfeld-parts", hypothesis="general", degree=(1, "nk"),
          statement="lambda_i(Re X) <= sigma_i(X); if Re X > 0: det Re X + |det Im X| <= |det X|",
          notes="the determinant part is vacuous on trials where Re X is not positive definite")
def _rotfeld(q: Quantities):
    re, im = sector.cartesian(q.mat)
    lam = linalg.hermitian_eigs(re, check=False)
    sv = q.singular_values
    worst = np.argmin(sv - lam, axis=-1)[..., None]
    parts = {"eigen": scalar(np.take_along_axis(sv, worst, -1)[..., 0],
                             np.take_along_axis(lam, worst, -1)[..., 0])}
    pd = sector.strictly_positive(lam)
    det_part = from_logs([logabsdet(q.mat)], [logdet_psd(re), logabsdet(im)])
    vac = outcome.vacuous(pd.shape)
    for name in ("lhs", "rhs", "margin", "scale"):
        setattr(det_part, name, np.where(pd, getattr(det_part, name), getattr(vac, name)))
    parts["determinant"] = det_part
    return parts


@register("sector-preserve", hypothesis="sector", degree=1,
          statement="W(H) in S_alpha implies W(tr_1 H), W(tr_2 H) in S_alpha")
def _sector_preserve(q: Quantities):
    t = math.tan(q.params["alpha"])
    parts = {}
    for name, m in (("tr1", q.tr1), ("tr2", q.tr2)):
        re, im = sector.cartesian(m)
        re_eigs = linalg.hermitian_eigs(re, check=False)
        floor = sector.STRICT_PD * np.maximum(1.0, re_eigs[..., 0])
        parts[f"{name}-re-pd"] = scalar(re_eigs[..., -1], floor)
        parts[f"{name}-minus"] = loewner(t * re, im)
        parts[f"{name}-plus"] = loewner(t * re, -im)
    return parts


# ---------------------------------------------------------------------------
# fm family

@register("fan-ky", hypothesis="psd", degree="k",
          statement="det((1/n) sum_i H_ii) >= (prod_i det H_ii)^(1/n)")
def _fan_ky(q: Quantities):
    lhs = logdet_psd(q.tr1 / q.n)
    rhs = sum(logdet_psd(b) for b in q.diag_blocks) / q.n
    return {"fan-ky": from_logs([lhs], [rhs])}


@register("fm", hypothesis="psd", degree="nk",
          statement="(det(tr_2 H) / k)^k >= det H")
def _fm(q: Quantities):
    lhs = q.k * (logdet_psd(q.tr2) - math.log(q.k))
    return {"fm": from_logs([lhs], [logdet_psd(q.mat)])}


@register("lin-tr1", hypothesis="psd", degree="nk",
          statement="(det(tr_1 H) / n)^n >= det H")
def _lin_tr1(q: Quantities):
    lhs = q.n * (logdet_psd(q.tr1) - math.log(q.n))
    return {"lin-tr1": from_logs([lhs], [logdet_psd(q.mat)])}


@register("fm-strong", hypothesis="psd", degree="nk",
          statement="(det(tr_2 H) / k^n)^k >= det H")
def _fm_strong(q: Quantities):
    lhs = q.k * (logdet_psd(q.tr2) - q.n * math.log(q.k))
    return {"fm-strong": from_logs([lhs], [logdet_psd(q.mat)])}


@register("lin-strong", hypothesis="psd", degree="nk",
          statement="(det(tr_1 H) / n^k)^n >= det H")
def _lin_strong(q: Quantities):
    lhs = q.n * (logdet_psd(q.tr1) - q.k * math.log(q.n))
    return {"lin-strong": from_logs([lhs], [logdet_psd(q.mat)])}


@register("kuai-tr2", hypothesis="sector", degree="nk",
          statement="|det(tr_2 H) / k^n|^k >= cos(alpha)^(nk) |det H|")
def _kuai_tr2(q: Quantities):
    lhs = q.k * (logabsdet(q.tr2) - q.n * math.log(q.k))
    rhs = q.dim * q.log_cos + logabsdet(q.mat)
    return {"kuai-tr2": from_logs([lhs], [rhs])}


@register("kuai-tr1", hypothesis="sector", degree="nk",
          statement="|det(tr_1 H) / n|^n >= cos(alpha)^((3n-2)k) |det H|")
def _kuai_tr1(q: Quantities):
    lhs = q.n * (logabsdet(q.tr1) - math.log(q.n))
    rhs = (3 * q.n - 2) * q.k * q.log_cos + logabsdet(q.mat)
    return {"kuai-tr1": from_logs([lhs], [rhs])}


@register("li-sector-tr1", hypothesis="sector", degree="nk",
          statement="|det(tr_1 H) / n^k|^n >= cos(alpha)^(nk) |det H|")
def _li_sector_tr1(q: Quantities):
    lhs = q.n * (logabsdet(q.tr1) - q.k * math.log(q.n))
    rhs = q.dim * q.log_cos + logabsdet(q.mat)
    return {"li-sector-tr1": from_logs([lhs], [rhs])}


@register("choi-cross", hypothesis="psd", degree=("k", "n"),
          statement="det(tr_1 H) >= tr(det_2 H); det(tr_2 H) >= tr(det_1 H)")
def _choi_cross(q: Quantities):
    return {
        "tr1-vs-det2": from_logs([logdet_psd(q.tr1)],
                                 [logdet_psd(b) for b in q.diag_blocks]),
        "tr2-vs-det1": from_logs([logdet_psd(q.tr2)],
                                 [logdet_psd(g) for g in q.reshuffled_diag_blocks]),
    }


def _log_sum(logs) -> np.ndarray:
    return outcome._logsumexp(np.stack(np.broadcast_arrays(*logs)))


@register("choi-fm", hypothesis="psd", degree="nk",
          statement="(tr(det_1 H) / k)^k >= det H; (tr(det_2 H) / n)^n >= det H")
def _choi_fm(q: Quantities):
    det1 = _log_sum([logdet_psd(g) for g in q.reshuffled_diag_blocks])
    det2 = _log_sum([logdet_psd(b) for b in q.diag_blocks])
    rhs = logdet_psd(q.mat)
    return {
        "det1": from_logs([q.k * (det1 - math.log(q.k))], [rhs]),
        "det2": from_logs([q.n * (det2 - math.log(q.n))], [rhs]),
    }


@register("choi-sector", hypothesis="sector", degree="nk",
          statement="(tr|det_1 H| / k)^k >= cos(alpha)^(nk) |det H|; same with det_2 and n",
          notes="|.| is the entrywise modulus")
def _choi_sector(q: Quantities):
    det1 = _log_sum([logabsdet(g) for g in q.reshuffled_diag_blocks])
    det2 = _log_sum([logabsdet(b) for b in q.diag_blocks])
    rhs = q.dim * q.log_cos + logabsdet(q.mat)
    return {
        "det1": from_logs([q.k * (det1 - math.log(q.k))], [rhs]),
        "det2": from_logs([q.n * (det2 - math.log(q.n))], [rhs]),
    }


# ---------------------------------------------------------------------------
# Ando family (Löwner order and determinant sums)

@register("audenaert", hypothesis="psd", degree=1, params=("q",),
          statement="tr A + ||A||_q >= ||tr_1 A||_q + ||tr_2 A||_q")
def _audenaert(q: Quantities):
    order = q.params["q"]
    norm = lambda m: spectral.schatten_from_singular(linalg.singular_values(m), order)
    lhs = q.trace.real + spectral.schatten_from_singular(q.singular_values, order)
    return {"audenaert": scalar(lhs, norm(q.tr1) + norm(q.tr2))}


@register("ando-lowner", hypothesis="psd", degree=1,
          statement="(tr A) I + A >= I_n (x) tr_1 A + tr_2 A (x) I_k")
def _ando(q: Quantities):
    big = q.scalar_eye(q.trace.real) + q.mat
    small = q.eye_n_kron(q.tr1) + q.kron_eye_k(q.tr2)
    return {"ando": loewner(big, small)}


@register("llh-lowner-1", hypothesis="psd", degree=1,
          statement="(tr A) I - tr_2 A (x) I_k >= A - I_n (x) tr_1 A")
def _llh1(q: Quantities):
    big = q.scalar_eye(q.trace.real) - q.kron_eye_k(q.tr2)
    small = q.mat - q.eye_n_kron(q.tr1)
    return {"llh-1": loewner(big, small)}


@register("llh-lowner-2", hypothesis="psd", degree=1,
          statement="(tr A) I + tr_2 A (x) I_k >= A + I_n (x) tr_1 A")
def _llh2(q: Quantities):
    big = q.scalar_eye(q.trace.real) + q.kron_eye_k(q.tr2)
    small = q.mat + q.eye_n_kron(q.tr1)
    return {"llh-2": loewner(big, small)}


@register("trace-dominates-tr2", hypothesis="psd", degree=1,
          statement="(tr A) I_n >= lambda_max(tr_2 A) I_n >= tr_2 A")
def _trace_dom(q: Quantities):
    eye = linalg.identity(q.n)
    tr2 = linalg.hermitian_part(q.tr2)
    lam_max = linalg.hermitian_eigs(tr2, check=False)[..., 0]
    return {
        "trace-vs-lambda-max": scalar(q.trace.real, lam_max),
        "lambda-max-vs-tr2": loewner(lam_max[..., None, None] * eye, tr2),
    }


def _choi_lowner(axis: int, sign: int):
    def evaluate(q: Quantities):
        at = blockops.partial_transpose(q.h)
        if axis == 2:
            big = q.kron_eye_k(blockops.partial_trace(at, 2))
        else:
            big = q.eye_n_kron(blockops.partial_trace(at, 1))
        return {"choi-lowner": loewner(big, sign * at.mat)}
    return evaluate


for _axis, _sign, _suffix in ((2, 1, "tr2-plus"), (2, -1, "tr2-minus"),
                              (1, 1, "tr1-plus"), (1, -1, "tr1-minus")):
    _lhs = "(tr_2 A^tau) (x) I_k" if _axis == 2 else "I_n (x) tr_1 A^tau"
    register(f"choi-lowner-{_suffix}", hypothesis="psd", degree=1,
             statement=f"{_lhs} >= {'+' if _sign > 0 else '-'}A^tau")(_choi_lowner(_axis, _sign))


@register("phi-commute", hypothesis="general",
          statement="Phi_1^-(Phi_2^-(X)) = Phi_2^-(Phi_1^-(X)) for every X")
def _phi_commute(q: Quantities):
    a = blockops.phi_map(blockops.phi_map(q.h, 2, "-"), 1, "-").mat
    b = blockops.phi_map(blockops.phi_map(q.h, 1, "-"), 2, "-").mat
    return {"phi-commute": outcome.identity(a, b)}


def _tr_log(q: Quantities):
    return q.dim * _log(q.trace.real)


@register("lin-det-sum", hypothesis="psd", degree="nk",
          statement="(tr A)^(nk) + det A >= det(tr_1 A)^n + det(tr_2 A)^k")
def _lin_det_sum(q: Quantities):
    lhs = [_tr_log(q), logdet_psd(q.mat)]
    rhs = [q.n * logdet_psd(q.tr1), q.k * logdet_psd(q.tr2)]
    return {"lin-det-sum": from_logs(lhs, rhs)}


def lin_lemma_prepare(h: BlockMatrix) -> BlockMatrix:
    """Build ``diag(X, Y, W, Z)`` meeting X >= W, X >= Z, X + Y >= W + Z.

    From four PSD diagonal blocks ``B1..B4`` of a PSD draw: ``W = B1``,
    ``X = W + B3``, ``Z = X^{1/2} C X^{1/2}`` with ``C = B2 / lambda_max(B2)``
    (so ``0 <= Z <= X``), and ``Y = (W + Z - X)_+ + B4 / 10``.
    """
    if h.n != 4:
        raise DomainError(f"lin-lemma draws need n = 4 blocks, got n = {h.n}")
    b1, b2, b3, b4 = (linalg.hermitian_part(h.block(i, i)) for i in range(4))
    w = b1
    x = w + b3
    c = b2 / np.linalg.eigvalsh(b2)[..., -1][..., None, None]
    x_half = linalg.sqrtm_psd(x)
    z = linalg.hermitian_part(x_half @ c @ x_half)
    ev, vec = np.linalg.eigh(w + z - x)
    pos = (vec * np.clip(ev, 0.0, None)[..., None, :]) @ linalg.dagger(vec)
    y = linalg.hermitian_part(pos) + b4 / 10.0
    mat = np.zeros_like(h.mat)
    kk = h.k
    for i, m in enumerate((x, y, w, z)):
        mat[..., i * kk:(i + 1) * kk, i * kk:(i + 1) * kk] = m
    return h.with_mat(mat)


@register("lin-lemma", hypothesis="psd", degree="k", requires=_needs_n(4),
          prepare=lin_lemma_prepare,
          statement="X >= W, X >= Z, X + Y >= W + Z (all PSD) imply det X + det Y >= det W + det Z",
          notes="X, Y, W, Z are the diagonal blocks H_11..H_44; the premises are verified")
def _lin_lemma(q: Quantities):
    x, y, w, z = q.diag_blocks
    tol = linalg.PSD_TOL
    for label, m in (("X >= W", x - w), ("X >= Z", x - z), ("X + Y >= W + Z", x + y - w - z)):
        eigs = linalg.hermitian_eigs(m, check=False)
        if not np.all(linalg.psd_margin(eigs, tol)):
            raise DomainError(f"lin-lemma premise {label} fails at tol {tol:g}")
    return {"lin-lemma": from_logs([logdet_psd(x), logdet_psd(y)],
                                   [logdet_psd(w), logdet_psd(z)])}


@register("det-3sum", hypothesis="psd", degree="k", requires=_needs_n_at_least(3),
          statement="det(A + B + C) + det C >= det(A + C) + det(B + C)",
          notes="A, B, C are the diagonal blocks H_11, H_22, H_33")
def _det_3sum(q: Quantities):
    a, b, c = q.diag_blocks[:3]
    return {"det-3sum": from_logs([logdet_psd(a + b + c), logdet_psd(c)],
                                  [logdet_psd(a + c), logdet_psd(b + c)])}


@register("prop46-1", hypothesis="psd", degree="nk",
          statement="(tr A)^(nk) + det(tr_1 A)^n >= det A + det(tr_2 A)^k")
def _prop46_1(q: Quantities):
    return {"prop46-1": from_logs([_tr_log(q), q.n * logdet_psd(q.tr1)],
                                  [logdet_psd(q.mat), q.k * logdet_psd(q.tr2)])}


@register("prop46-2", hypothesis="psd", degree="nk",
          statement="(tr A)^(nk) + det(tr_2 A)^k >= det A + det(tr_1 A)^n")
def _prop46_2(q: Quantities):
    return {"prop46-2": from_logs([_tr_log(q), q.k * logdet_psd(q.tr2)],
                                  [logdet_psd(q.mat), q.n * logdet_psd(q.tr1)])}


@register("thm47-1", hypothesis="psd", degree="nk",
          statement="(tr A)^(nk) + det(tr_1 A)^n >= n^(nk) (det A + det(tr_2 A)^k)")
def _thm47_1(q: Quantities):
    factor = q.dim * math.log(q.n)
    return {"thm47-1": from_logs([_tr_log(q), q.n * logdet_psd(q.tr1)],
                                 [factor + logdet_psd(q.mat), factor + q.k * logdet_psd(q.tr2)])}


@register("thm47-2", hypothesis="psd", degree="nk",
          statement="(tr A)^(nk) + det(tr_2 A)^k >= k^(nk) (det A + det(tr_1 A)^n)")
def _thm47_2(q: Quantities):
    factor = q.dim * math.log(q.k)
    return {"thm47-2": from_logs([_tr_log(q), q.k * logdet_psd(q.tr2)],
                                 [factor + logdet_psd(q.mat), factor + q.n * logdet_psd(q.tr1)])}


def _trace_modulus_log(q: Quantities):
    return q.dim * _log(np.sum(q.singular_values, axis=-1))


@register("ylc-sector", hypothesis="sector", degree="nk",
          statement="(tr|A|)^(nk) + det|A| >= cos(alpha)^(nk) (|det tr_1 A|^n + |det tr_2 A|^k)",
          notes="|A| = (A*A)^(1/2)")
def _ylc(q: Quantities):
    c = q.dim * q.log_cos
    return {"ylc": from_logs([_trace_modulus_log(q), logabsdet(q.mat)],
                             [c + q.n * logabsdet(q.tr1), c + q.k * logabsdet(q.tr2)])}


@register("thm48-1", hypothesis="sector", degree="nk",
          statement="(tr|A|)^(nk) + |det tr_1 A|^n >= (n cos alpha)^(nk) (det|A| + |det tr_2 A|^k)")
def _thm48_1(q: Quantities):
    c = q.dim * (math.log(q.n) + q.log_cos)
    return {"thm48-1": from_logs([_trace_modulus_log(q), q.n * logabsdet(q.tr1)],
                                 [c + logabsdet(q.mat), c + q.k * logabsdet(q.tr2)])}


@register("thm48-2", hypothesis="sector", degree="nk",
          statement="(tr|A|)^(nk) + |det tr_2 A|^k >= (k cos alpha)^(nk) (det|A| + |det tr_1 A|^n)")
def _thm48_2(q: Quantities):
    c = q.dim * (math.log(q.k) + q.log_cos)
    return {"thm48-2": from_logs([_trace_modulus_log(q), q.k * logabsdet(q.tr2)],
                                 [c + logabsdet(q.mat), c + q.n * logabsdet(q.tr1)])}


# ---------------------------------------------------------------------------
# 2 x 2 block matrices [[A, B], [B*, C]]

def _kl_pair(a, c, b_sq, ac, bb):
    """Both inequalities given ``f(A) f(C)``-style scalars.

    ``a*c - b_sq >= |ac - bb|`` and ``a*c + b_sq >= ac + bb``.
    """
    return {
        "minus": scalar(a * c - b_sq, np.abs(ac - bb)),
        "plus": scalar(a * c + b_sq, ac + bb),
    }


@register("kl-trace-1", hypothesis="psd", degree=2, requires=_needs_n(2),
          statement="tr A tr C - tr B* tr B >= |tr AC - tr B*B|")
def _kl_trace_1(q: Quantities):
    a, b, c = q.two_by_two()
    tb = linalg.trace(b)
    lhs = linalg.trace(a).real * linalg.trace(c).real - np.abs(tb) ** 2
    rhs = np.abs(linalg.trace(a @ c) - linalg.trace(linalg.dagger(b) @ b))
    return {"kl-trace-1": scalar(lhs, rhs)}


@register("kl-trace-2", hypothesis="psd", degree=2, requires=_needs_n(2),
          statement="tr A tr C + tr B* tr B >= tr AC + tr B*B")
def _kl_trace_2(q: Quantities):
    a, b, c = q.two_by_two()
    tb = linalg.trace(b)
    lhs = linalg.trace(a).real * linalg.trace(c).real + np.abs(tb) ** 2
    rhs = (linalg.trace(a @ c) + linalg.trace(linalg.dagger(b) @ b)).real
    return {"kl-trace-2": scalar(lhs, rhs)}


@register("kl-tensor-r", hypothesis="psd", degree="2r", params=("r",), requires=_needs_n(2),
          statement="(trA trC)^r -/+ (trB* trB)^r >= |(tr AC)^r - (tr B*B)^r| and "
                    ">= (tr AC)^r + (tr B*B)^r")
def _kl_tensor(q: Quantities):
    r = q.params["r"]
    a, b, c = q.two_by_two()
    ac = linalg.trace(a).real * linalg.trace(c).real
    b_sq = np.abs(linalg.trace(b)) ** 2
    tr_ac = linalg.trace(a @ c).real
    tr_bb = linalg.trace(linalg.dagger(b) @ b).real
    return _kl_pair(ac ** r, 1.0, b_sq ** r, tr_ac ** r, tr_bb ** r)


@register("kl-elem-t", hypothesis="psd", degree="2t", params=("t",), requires=_needs_n(2),
          statement="e_t(A)e_t(C) -/+ e_t(B*)e_t(B) >= |e_t(AC) - e_t(B*B)| and "
                    ">= e_t(AC) + e_t(B*B)",
          notes="e_t of non-Hermitian B and AC is tr of the t-th compound")
def _kl_elem(q: Quantities):
    t = q.params["t"]
    a, b, c = q.two_by_two()
    ea = spectral.elem_sym(linalg.hermitian_part(a), t)
    ec = spectral.elem_sym(linalg.hermitian_part(c), t)
    eb = spectral.principal_minor_sums(b, t)
    eac = spectral.principal_minor_sums(a @ c, t).real
    ebb = spectral.elem_sym(linalg.hermitian_part(linalg.dagger(b) @ b), t)
    return _kl_pair(ea, ec, np.abs(eb) ** 2, eac, ebb)


@register("kl-complete-t", hypothesis="psd", degree="2t", params=("t",), requires=_needs_n(2),
          statement="s_t(A)s_t(C) -/+ s_t(B*)s_t(B) >= |s_t(AC) - s_t(B*B)| and "
                    ">= s_t(AC) + s_t(B*B)")
def _kl_complete(q: Quantities):
    t = q.params["t"]
    a, b, c = q.two_by_two()
    sa = spectral.complete_sym(linalg.hermitian_part(a), t)
    sc = spectral.complete_sym(linalg.hermitian_part(c), t)
    sb = spectral.complete_sym(b, t, hermitian=False)
    sac = spectral.complete_sym(a @ c, t, hermitian=False).real
    sbb = spectral.complete_sym(linalg.hermitian_part(linalg.dagger(b) @ b), t)
    return _kl_pair(sa, sc, np.abs(sb) ** 2, sac, sbb)


@register("pauli-identity", hypothesis="general",
          statement="(1/n) sum_{l,j} (X^l Y^j (x) I) H (X^l Y^j (x) I)* = I_n (x) tr_1 H")
def _pauli(q: Quantities):
    from .identities import pauli_average
    return {"pauli": outcome.identity(pauli_average(q.h), q.eye_n_kron(q.tr1))}


# ---------------------------------------------------------------------------
# evaluation pipeline

def validate_params(case: InequalityCase, params: dict | None, k: int) -> dict:
    params = dict(params or {})
    unknown = set(params) - set(case.params)
    if unknown:
        raise UsageError(f"{case.id} takes no parameter(s) {sorted(unknown)}")
    out = {}
    for name in case.params:
        if name == "alpha":
            if "alpha" in params and params["alpha"] is not None:
                alpha = float(params["alpha"])
                if not 0.0 <= alpha < math.pi / 2:
                    raise UsageError(f"alpha must lie in [0, pi/2), got {alpha}")
                out["alpha"] = alpha
            continue
        if params.get(name) is None:
            raise UsageError(f"{case.id} requires parameter {name!r}")
        value = params[name]
        if name == "q":
            value = spectral.parse_q(value)
            value = int(value) if math.isfinite(value) else value
        else:
            if isinstance(value, bool) or int(value) != value or int(value) < 1:
                raise UsageError(f"{name} must be a positive integer, got {value!r}")
            value = int(value)
            if name == "t" and value > k:
                raise UsageError(f"t = {value} exceeds block order k = {k}")
        out[name] = value
    return out


def normalization_factor(h: BlockMatrix, hypothesis: str) -> np.ndarray:
    """Positive per-matrix factor ``c``: ``tr(c H) = nk`` for PSD input,
    ``tr Re(c H) = nk`` for sector input, ``||c H||_F = sqrt(nk)`` otherwise."""
    mat = h.mat
    if hypothesis in ("psd", "sector"):
        size = linalg.trace(mat).real
        target = float(h.dim)
    else:
        size = np.sqrt(np.sum(np.abs(mat) ** 2, axis=(-2, -1)))
        target = math.sqrt(h.dim)
    ok = np.isfinite(size) & (size > 0)
    return np.where(ok, target / np.where(ok, size, 1.0), 1.0)


def normalize(h: BlockMatrix, hypothesis: str) -> BlockMatrix:
    return h.with_mat(h.mat * normalization_factor(h, hypothesis)[..., None, None])


def part_degrees(case: InequalityCase, n: int, k: int, params: dict) -> list:
    """Homogeneity degree of each part (``None`` for degree-free parts)."""
    env = {"n": n, "k": k, "nk": n * k, "2r": 2 * params.get("r", 0),
           "2t": 2 * params.get("t", 0)}
    deg = case.degree
    if deg is None:
        return [None]
    items = deg if isinstance(deg, tuple) else (deg,)
    return [env[d] if isinstance(d, str) else d for d in items]


def verify_hypothesis(case: InequalityCase, h: BlockMatrix, params: dict,
                      tol: float = linalg.PSD_TOL) -> None:
    reason = case.reason_inapplicable(h.n, h.k)
    if reason:
        raise DomainError(f"{case.id} {reason}")
    if case.hypothesis == "psd":
        sym = linalg.check_hermitian(h.mat)
        eigs = linalg.hermitian_eigs(sym, check=False)
        bad = ~linalg.psd_margin(eigs, tol)
        if np.any(bad):
            raise DomainError(f"input not PSD at tol {tol:g} "
                              f"(min eigenvalue {float(np.min(eigs[..., -1])):.3e})")
    elif case.hypothesis == "sector":
        alpha = params["alpha"]
        re_eigs, minus, plus = sector.sector_margins(h.mat, alpha)
        if not np.all(sector.strictly_positive(re_eigs)):
            raise DomainError("input is not a sector matrix: Re A not positive definite")
        if not np.all(linalg.psd_margin(minus, tol) & linalg.psd_margin(plus, tol)):
            raise DomainError(f"numerical range not contained in the sector at alpha={alpha:g}")


@dataclass
class BatchResult:
    """Per-trial results of one case on a stack."""

    case: InequalityCase
    params: dict
    parts: dict
    tol: float
    evaluated: BlockMatrix = field(repr=False)

    @cached_property
    def relative(self) -> np.ndarray:
        return np.min(np.stack([p.relative for p in self.parts.values()]), axis=0)

    @cached_property
    def worst_part(self) -> np.ndarray:
        return np.argmin(np.stack([p.relative for p in self.parts.values()]), axis=0)

    @cached_property
    def passed(self) -> np.ndarray:
        return np.all(np.stack([p.passed(self.tol) for p in self.parts.values()]), axis=0)

    def outcome(self, i: int = 0) -> CheckOutcome:
        names = list(self.parts)
        name = names[int(self.worst_part[i])]
        p = self.parts[name]
        return CheckOutcome(
            case=self.case.id, params=dict(self.params),
            lhs=float(p.lhs[i]), rhs=float(p.rhs[i]), margin=float(p.margin[i]),
            scale=float(p.scale[i]), passed=bool(self.passed[i]),
            log_domain=bool(p.log_domain[i]), kind=p.kind, tol=self.tol, part=name,
            parts=[outcome.part_detail(nm, self.parts[nm], i, self.tol) for nm in names],
        )


def run_case(case: InequalityCase, h: BlockMatrix, params: dict | None = None,
             tol: float = outcome.DEFAULT_TOL, *, rescale: bool = True,
             verify: bool = True) -> BatchResult:
    """Evaluate ``case`` on a stack ``h`` (already prepared, e.g. for lin-lemma)."""
    params = validate_params(case, params, h.k)
    if h.mat.ndim == 2:
        h = h.with_mat(h.mat[None])
    if case.hypothesis == "sector" and "alpha" not in params:
        raise UsageError(f"{case.id} requires parameter 'alpha'")
    factor = normalization_factor(h, case.hypothesis) if rescale else np.ones(h.mat.shape[:-2])
    work = h.with_mat(h.mat * factor[..., None, None])
    if case.hypothesis == "psd":
        sym = linalg.check_hermitian(work.mat) if verify else linalg.hermitian_part(work.mat)
        work = work.with_mat(sym)
    if verify:
        verify_hypothesis(case, work, params)
    parts = case.evaluate(Quantities(work, params))
    if rescale:
        degrees = part_degrees(case, h.n, h.k, params)
        log_c = np.log(factor)
        parts = {name: (p if degrees[min(i, len(degrees) - 1)] is None else
                        outcome.rescale(p, -degrees[min(i, len(degrees) - 1)] * log_c))
                 for i, (name, p) in enumerate(parts.items())}
    return BatchResult(case, params, parts, tol, h)


def evaluate_check(case_id: str, h: BlockMatrix, params: dict | None = None,
                   tol: float = outcome.DEFAULT_TOL) -> CheckOutcome:
    """Evaluate one registry entry on one block matrix.

    For sector entries without an explicit ``alpha`` the input's own minimal
    sector angle is used.
    """
    case = get_case(case_id)
    if h.mat.ndim != 2:
        raise UsageError("evaluate_check takes a single matrix; use run_case for stacks")
    params = dict(params or {})
    if case.hypothesis == "sector" and params.get("alpha") is None:
        report = sector.sector_angle(h.mat)
        if not report.is_sector:
            raise DomainError("input is not a sector matrix: Re A not positive definite")
        params["alpha"] = min(report.alpha_min, math.nextafter(math.pi / 2, 0))
    return run_case(case, h, params, tol).outcome(0)
