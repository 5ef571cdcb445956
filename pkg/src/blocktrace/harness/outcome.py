"""Check outcomes, scalar and Löwner, in batched and single form."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import linalg

LOG_SWITCH = 700.0
DEFAULT_TOL = 1e-8
NEAR_EQUALITY = 1e-6


@dataclass
class Part:
    """One inequality evaluated over a stack of trials.

    ``margin = lhs - rhs`` (a log difference where ``log_domain`` is set) and
    the trial passes when ``margin >= -tol * scale``.
    """

    lhs: np.ndarray
    rhs: np.ndarray
    margin: np.ndarray
    scale: np.ndarray
    log_domain: np.ndarray
    kind: str = "scalar"
    eigs: np.ndarray | None = None

    @property
    def relative(self) -> np.ndarray:
        return self.margin / self.scale

    def passed(self, tol: float) -> np.ndarray:
        return self.margin >= -tol * self.scale


def scalar(lhs, rhs) -> Part:
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return Part(lhs, rhs, lhs - rhs, scale, np.zeros(lhs.shape, dtype=bool))


def _logsumexp(logs: np.ndarray) -> np.ndarray:
    top = np.max(logs, axis=0)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        return safe + np.log(np.sum(np.exp(logs - safe), axis=0))


def from_logs(lhs_logs, rhs_logs) -> Part:
    """Compare sums of nonnegative terms given by their logarithms.

    Terms are exponentiated unless some term's log exceeds ``LOG_SWITCH``,
    in which case both sides are compared as log-sum-exp.  A zero term is
    ``-inf``.
    """
    arrs = np.broadcast_arrays(*[np.asarray(x, dtype=float) for x in (*lhs_logs, *rhs_logs)])
    lhs_l = np.stack(arrs[:len(lhs_logs)])
    rhs_l = np.stack(arrs[len(lhs_logs):])
    both = np.concatenate([lhs_l, rhs_l])
    big = np.max(np.where(np.isfinite(both), both, -np.inf), axis=0) > LOG_SWITCH
    with np.errstate(over="ignore"):
        lhs = np.sum(np.exp(np.where(big, -np.inf, lhs_l)), axis=0)
        rhs = np.sum(np.exp(np.where(big, -np.inf, rhs_l)), axis=0)
    part = scalar(lhs, rhs)
    if np.any(big):
        llog, rlog = _logsumexp(lhs_l), _logsumexp(rhs_l)
        with np.errstate(invalid="ignore"):
            lmargin = np.where(np.isneginf(llog) & np.isneginf(rlog), 0.0, llog - rlog)
        part.lhs = np.where(big, llog, part.lhs)
        part.rhs = np.where(big, rlog, part.rhs)
        part.margin = np.where(big, lmargin, part.margin)
        part.scale = np.where(big, 1.0, part.scale)
        part.log_domain = big
    return part


def loewner(big: np.ndarray, small: np.ndarray) -> Part:
    """``big >= small`` in the Löwner order; the margin is ``lambda_min(big - small)``."""
    eigs = linalg.hermitian_eigs(big - small, check=False)
    norm_big = np.max(np.abs(linalg.hermitian_eigs(big, check=False)), axis=-1)
    norm_small = np.max(np.abs(linalg.hermitian_eigs(small, check=False)), axis=-1)
    scale = np.maximum(1.0, np.maximum(norm_big, norm_small))
    margin = eigs[..., -1]
    return Part(margin, np.zeros_like(margin), margin, scale,
                np.zeros(margin.shape, dtype=bool), kind="loewner", eigs=eigs)


def identity(left: np.ndarray, right: np.ndarray) -> Part:
    """Exact matrix identity; the residual is max-norm relative to the operands."""
    resid = linalg.max_abs(left - right)
    scale = np.maximum(1.0, np.maximum(linalg.max_abs(left), linalg.max_abs(right)))
    rel = resid / scale
    zero = np.zeros_like(rel)
    return Part(zero, rel, -rel, np.ones_like(rel), np.zeros(rel.shape, dtype=bool),
                kind="identity")


def rescale(part: Part, log_factor: np.ndarray) -> Part:
    """Re-express a part in other units: values are multiplied by ``exp(log_factor)``.

    Used to report a check evaluated on ``c*H`` in the units of ``H``
    (``log_factor = -degree * log c``).  ``margin / scale`` and the verdict are
    unchanged.  Trials whose rescaled values would leave the double range are
    moved to the log domain.
    """
    if part.kind in ("identity", "vacuous"):
        return part
    log_factor = np.broadcast_to(np.asarray(log_factor, dtype=float), part.margin.shape)
    factor = np.exp(np.clip(log_factor, -LOG_SWITCH, LOG_SWITCH))
    lin = ~part.log_domain
    with np.errstate(over="ignore", invalid="ignore"):
        new_scale = part.scale * factor
    out_of_range = lin & ((np.abs(log_factor) >= LOG_SWITCH)
                          | ~(np.isfinite(new_scale) & (new_scale > 1e-290)))
    if part.kind == "loewner" and np.any(out_of_range):
        # Löwner margins can be negative: keep them in evaluation units
        lin = lin & ~out_of_range
        out_of_range = np.zeros_like(out_of_range)
        factor = np.where(lin, factor, 1.0)
    move = out_of_range
    keep = lin & ~move
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        llog = np.log(np.where(move, part.lhs, 1.0)) + log_factor
        rlog = np.log(np.where(move, part.rhs, 1.0)) + log_factor
        lmargin = np.where(np.isneginf(llog) & np.isneginf(rlog), 0.0, llog - rlog)
        f = np.where(keep, factor, 1.0)
        lhs = np.where(move, llog, np.where(keep, part.lhs * f, part.lhs + log_factor))
        rhs = np.where(move, rlog, np.where(keep, part.rhs * f, part.rhs + log_factor))
        margin = np.where(move, lmargin, np.where(keep, part.margin * f, part.margin))
        scale = np.where(move, 1.0, np.where(keep, part.scale * f, part.scale))
    eigs = None
    if part.eigs is not None:
        eigs = part.eigs * np.where(keep, factor, 1.0)[..., None]
    if part.kind == "loewner":
        rhs = np.zeros_like(margin)
        lhs = margin
    return Part(lhs, rhs, margin, scale, part.log_domain | move, part.kind, eigs)


def vacuous(shape) -> Part:
    """Placeholder for a conditional part whose premise fails on a trial."""
    z = np.zeros(shape)
    return Part(z, z, np.full(shape, np.inf), np.ones(shape), np.zeros(shape, dtype=bool),
                kind="vacuous")


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass(frozen=True)
class CheckOutcome:
    """Result of one check on one matrix.

    ``margin = lhs - rhs``; for a Löwner part ``lhs`` is the least eigenvalue
    of ``LHS - RHS`` and ``rhs`` is 0.  ``passed`` iff ``margin >= -tol*scale``.
    Multi-part checks report their worst part at top level and every part in
    ``parts``.
    """

    case: str
    params: dict
    lhs: float
    rhs: float
    margin: float
    scale: float
    passed: bool
    log_domain: bool
    kind: str
    tol: float
    part: str
    parts: list = field(default_factory=list)

    @property
    def relative_margin(self) -> float:
        return self.margin / self.scale

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "case": self.case,
            "params": {k: _param_json(v) for k, v in self.params.items()},
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "margin": _num(self.margin),
            "scale": _num(self.scale),
            "pass": bool(self.passed),
            "log_domain": bool(self.log_domain),
            "kind": self.kind,
            "tol": self.tol,
            "worst_part": self.part,
            "parts": self.parts,
        }


def _param_json(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def part_detail(name: str, part: Part, i: int, tol: float) -> dict:
    d = {
        "part": name,
        "kind": part.kind,
        "lhs": _num(part.lhs[i]),
        "rhs": _num(part.rhs[i]),
        "margin": _num(part.margin[i]),
        "scale": _num(part.scale[i]),
        "pass": bool(part.passed(tol)[i]),
        "log_domain": bool(part.log_domain[i]),
    }
    if part.eigs is not None:
        d["eigenvalues"] = [float(x) for x in part.eigs[i]]
    return d
