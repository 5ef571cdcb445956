"""Deliberately false variants of registry entries.

The fuzz loop must report failures for each of these; a harness that
passes them is vacuous.  They are kept out of :data:`registry.REGISTRY`.
"""

from __future__ import annotations

import math

from . import registry
from .outcome import from_logs, loewner
from .registry import InequalityCase, Quantities, logabsdet, logdet_psd


def _fm_k_plus_one(q: Quantities):
    # det(tr_2 H / k)^k >= det H with the normalizing constant k -> k + 1
    lhs = q.k * (logdet_psd(q.tr2) - q.n * math.log(q.k + 1))
    return {"fm": from_logs([lhs], [logdet_psd(q.mat)])}


def _kuai_tr2_no_cos(q: Quantities):
    lhs = q.k * (logabsdet(q.tr2) - q.n * math.log(q.k))
    return {"kuai-tr2": from_logs([lhs], [logabsdet(q.mat)])}


def _ando_flipped(q: Quantities):
    big = q.scalar_eye(q.trace.real) - q.mat
    small = q.eye_n_kron(q.tr1) + q.kron_eye_k(q.tr2)
    return {"ando": loewner(big, small)}


MUTANTS: dict[str, InequalityCase] = {
    "mutant-fm-k-plus-1": InequalityCase(
        "mutant-fm-k-plus-1", "psd", "det(tr_2 H / (k+1))^k >= det H",
        _fm_k_plus_one, degree="nk"),
    "mutant-kuai-tr2-no-cos": InequalityCase(
        "mutant-kuai-tr2-no-cos", "sector", "|det(tr_2 H) / k^n|^k >= |det H|",
        _kuai_tr2_no_cos, degree="nk", params=("alpha",)),
    "mutant-ando-lowner-flipped": InequalityCase(
        "mutant-ando-lowner-flipped", "psd",
        "(tr A) I - A >= I_n (x) tr_1 A + tr_2 A (x) I_k", _ando_flipped, degree=1),
}


def resolve(case_id: str) -> InequalityCase:
    """Look up a registry entry or a mutant."""
    if case_id in MUTANTS:
        return MUTANTS[case_id]
    return registry.get_case(case_id)
