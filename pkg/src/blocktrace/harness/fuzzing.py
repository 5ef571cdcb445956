"""Seeded fuzzing of registry entries.

Trials are processed in fixed index ranges of ``CHUNK`` draws; every trial's
input depends only on ``(spec.seed, index)`` and results are combined in
index order, so serial and parallel runs produce identical reports.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .. import randgen
from ..blockops import BlockMatrix
from ..errors import DomainError, UsageError
from ..randgen import GenSpec
from . import mutants, registry
from .outcome import DEFAULT_TOL, NEAR_EQUALITY, _num, _param_json
from .registry import ACCEPTED_CLASSES, InequalityCase

CHUNK = 250
SCHEMA_VERSION = 1
CAMPAIGN_DIMS = tuple((n, k) for n in (2, 3, 4) for k in (2, 3, 4) if n * k <= 16)
CAMPAIGN_ALPHAS = (0.3, 0.6, 1.0)
CAMPAIGN_SEED = 20240917


def matrix_file(h: BlockMatrix) -> dict:
    """A single matrix in the MatrixFile layout."""
    data = [[[float(z.real), float(z.imag)] for z in row] for row in h.mat]
    return {"schema_version": SCHEMA_VERSION, "n": h.n, "k": h.k, "data": data}


@dataclass(frozen=True)
class CellResult:
    params: dict
    trials: int
    failures: int
    min_margin: float
    near_equality_count: int
    worst_trial: int


@dataclass(frozen=True)
class FuzzReport:
    """Aggregate of one case (or of ``all``) over seeded draws."""

    case: str
    spec: GenSpec
    trials: int
    failures: int
    min_margin: float
    near_equality_count: int
    tol: float
    worst_input: BlockMatrix | None = None
    worst: dict | None = None
    cells: tuple = ()
    cases: tuple = ()
    skipped: tuple = ()

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "case": self.case,
            "spec": self.spec.to_dict(),
            "tol": self.tol,
            "trials": self.trials,
            "failures": self.failures,
            "min_margin": _num(self.min_margin),
            "near_equality_count": self.near_equality_count,
            "worst": self.worst,
            "worst_input": matrix_file(self.worst_input) if self.worst_input is not None else None,
        }
        if self.cells:
            d["cells"] = [
                {"params": {k: _param_json(v) for k, v in c.params.items()},
                 "trials": c.trials, "failures": c.failures,
                 "min_margin": _num(c.min_margin),
                 "near_equality_count": c.near_equality_count}
                for c in self.cells
            ]
        if self.cases:
            d["cases"] = [r.to_dict() for r in self.cases]
        if self.skipped:
            d["skipped"] = [{"case": c, "reason": r} for c, r in self.skipped]
        return d


@lru_cache(maxsize=8)
def _draw_chunk(spec: GenSpec, start: int, stop: int) -> BlockMatrix:
    return randgen.generate_trials(spec, np.arange(start, stop, dtype=np.uint64))


def _inputs(case: InequalityCase, spec: GenSpec, start: int, stop: int) -> BlockMatrix:
    h = _draw_chunk(spec, start, stop)
    return case.prepare(h) if case.prepare else h


def _run_chunk(job) -> tuple[np.ndarray, np.ndarray]:
    case_id, spec, params, start, stop, tol = job
    case = mutants.resolve(case_id)
    res = registry.run_case(case, _inputs(case, spec, start, stop), params, tol)
    return res.relative, res.passed


def check_compatible(case: InequalityCase, spec: GenSpec) -> None:
    if spec.cls not in ACCEPTED_CLASSES[case.hypothesis]:
        raise DomainError(
            f"hypothesis mismatch: {case.id} requires {case.hypothesis} input, "
            f"class {spec.cls} is not accepted")
    reason = case.reason_inapplicable(spec.n, spec.k)
    if reason:
        raise DomainError(f"{case.id} {reason}")


def _cell_params(case: InequalityCase, spec: GenSpec, params: dict | None) -> list[dict]:
    cells = [dict(params)] if params else case.grid(spec.n, spec.k)
    if "alpha" in case.params:
        cells = [dict(c, alpha=c.get("alpha", spec.alpha)) for c in cells]
    return cells


def _fuzz_one(case: InequalityCase, spec: GenSpec, trials: int, params: dict | None,
              tol: float, pool) -> FuzzReport:
    check_compatible(case, spec)
    bounds = [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]
    cells = []
    worst = None
    for cell in _cell_params(case, spec, params):
        registry.validate_params(case, cell, spec.k)
        jobs = [(case.id, spec, cell, a, b, tol) for a, b in bounds]
        results = list(pool.map(_run_chunk, jobs)) if pool else [_run_chunk(j) for j in jobs]
        rel = np.concatenate([r[0] for r in results])
        passed = np.concatenate([r[1] for r in results])
        # argmin picks the lowest index on ties; failures rank below passes
        order = np.where(passed, rel, -np.inf) if not passed.all() else rel
        idx = int(np.argmin(order))
        cr = CellResult(cell, trials, int(np.sum(~passed)), float(np.min(rel)),
                        int(np.sum(rel < NEAR_EQUALITY)), idx)
        cells.append(cr)
        key = (cr.failures == 0, cr.min_margin)
        if worst is None or key < worst[0]:
            worst = (key, cr)
    failures = sum(c.failures for c in cells)
    worst_info = worst_input = None
    if failures:
        cr = worst[1]
        h = _inputs(case, spec, cr.worst_trial, cr.worst_trial + 1)
        worst_input = h[0]
        outcome = registry.run_case(case, h, cr.params, tol).outcome(0)
        worst_info = {
            "params": {k: _param_json(v) for k, v in cr.params.items()},
            "trial": cr.worst_trial,
            "seed": randgen.derive_trial_seed(spec.seed, cr.worst_trial),
            "outcome": outcome.to_dict(),
        }
    return FuzzReport(
        case=case.id, spec=spec, trials=trials * len(cells), failures=failures,
        min_margin=min(c.min_margin for c in cells),
        near_equality_count=sum(c.near_equality_count for c in cells), tol=tol,
        worst_input=worst_input, worst=worst_info, cells=tuple(cells))


def _combine(spec: GenSpec, reports: list[FuzzReport], skipped: list, tol: float) -> FuzzReport:
    failing = [r for r in reports if r.failures]
    head = min(failing, key=lambda r: r.min_margin) if failing else None
    return FuzzReport(
        case="all", spec=spec, trials=sum(r.trials for r in reports),
        failures=sum(r.failures for r in reports),
        min_margin=min((r.min_margin for r in reports), default=math.inf),
        near_equality_count=sum(r.near_equality_count for r in reports), tol=tol,
        worst_input=head.worst_input if head else None,
        worst=dict(head.worst, case=head.case) if head else None,
        cases=tuple(reports), skipped=tuple(skipped))


def fuzz(case_id: str | InequalityCase, spec: GenSpec, trials: int, *,
         params: dict | None = None, tol: float = DEFAULT_TOL,
         workers: int = 1) -> FuzzReport:
    """Fuzz one entry (or ``"all"`` entries accepting ``spec.cls``) on ``trials`` draws.

    Without ``params`` every cell of the entry's default grid is run on the
    same draws.  ``workers > 1`` evaluates chunks in worker processes.
    """
    if isinstance(trials, bool) or not isinstance(trials, (int, np.integer)) or trials < 1:
        raise UsageError(f"trials must be a positive integer, got {trials!r}")
    if workers < 1:
        raise UsageError(f"workers must be >= 1, got {workers}")
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        if isinstance(case_id, InequalityCase):
            return _fuzz_one(case_id, spec, int(trials), params, tol, pool)
        if case_id != "all":
            return _fuzz_one(mutants.resolve(case_id), spec, int(trials), params, tol, pool)
        if params:
            raise UsageError("parameters cannot be fixed for an 'all' campaign")
        reports, skipped = [], []
        for cid in registry.case_ids():
            case = registry.REGISTRY[cid]
            if spec.cls not in ACCEPTED_CLASSES[case.hypothesis]:
                continue
            reason = case.reason_inapplicable(spec.n, spec.k)
            if reason:
                skipped.append((cid, reason))
                continue
            reports.append(_fuzz_one(case, spec, int(trials), None, tol, pool))
        return _combine(spec, reports, skipped, tol)
    finally:
        if pool:
            pool.shutdown()


def campaign_specs(case: InequalityCase, seed: int = CAMPAIGN_SEED):
    """Generator specs of the default campaign for one entry."""
    cls = {"psd": "psd", "sector": "sector", "general": "general"}[case.hypothesis]
    alphas = CAMPAIGN_ALPHAS if case.hypothesis == "sector" else (0.0,)
    for n, k in CAMPAIGN_DIMS:
        if case.reason_inapplicable(n, k):
            continue
        for alpha in alphas:
            yield GenSpec(cls, n, k, alpha=alpha, seed=seed)


@dataclass
class CampaignResult:
    reports: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(r.failures for r in self.reports)

    @property
    def cells(self) -> int:
        return sum(len(r.cells) for r in self.reports)


def campaign(trials: int = 1000, *, seed: int = CAMPAIGN_SEED, tol: float = DEFAULT_TOL,
             case_ids=None, workers: int = 1) -> CampaignResult:
    """Every entry on its hypothesis class over the default dims/params grid."""
    out = CampaignResult()
    ids = case_ids if case_ids is not None else registry.case_ids()
    for cid in ids:
        case = registry.get_case(cid)
        for spec in campaign_specs(case, seed):
            out.reports.append(fuzz(case, spec, trials, tol=tol, workers=workers))
    return out
