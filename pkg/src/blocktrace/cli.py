"""Command-line front end.

Exit codes: 0 pass, 1 mathematical violation, 2 usage or input error.
The environment variable ``BLOCKTRACE_TOL`` overrides the default check
slack of 1e-8.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import blockops, linalg, randgen, sector
from .errors import BlockTraceError, UsageError
from .harness import fuzzing
from .harness import registry
from .harness.outcome import DEFAULT_TOL
from .matrixio import (atomic_write, complex_json, format_matrix_file, read_matrix_file,
                       write_matrix_file)

EXIT_PASS, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2
TOL_ENV = "BLOCKTRACE_TOL"


def slack_from_env() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV} must be a decimal number, got {raw!r}") from None
    if not (math.isfinite(tol) and tol >= 0):
        raise UsageError(f"{TOL_ENV} must be finite and nonnegative, got {raw!r}")
    return tol


def dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def analyze(h: blockops.BlockMatrix) -> dict:
    mat = h.mat
    skew = float(np.max(np.abs(mat - linalg.dagger(mat)), initial=0.0))
    hermitian = skew <= linalg.HERMITIAN_TOL * max(1.0, float(np.max(np.abs(mat), initial=0.0)))
    tr1 = blockops.partial_trace(h, 1)
    tr2 = blockops.partial_trace(h, 2)
    tau = blockops.partial_transpose(h)
    report = sector.sector_angle(mat)
    re_eigs = linalg.hermitian_eigs(report.re_part, check=False)
    out = {
        "schema_version": 1,
        "n": h.n,
        "k": h.k,
        "trace": complex_json(linalg.trace(mat)),
        "hermitian": bool(hermitian),
        "tr1": complex_json(tr1),
        "tr2": complex_json(tr2),
        "partial_transpose": complex_json(tau.mat),
        "det1": complex_json(blockops.partial_det(h, 1)),
        "det2": complex_json(blockops.partial_det(h, 2)),
        "det": complex_json(linalg.det(mat).value),
        "singular_values": [float(x) for x in linalg.singular_values(mat)],
        "re_part_eigenvalues": [float(x) for x in re_eigs],
        "sector": {"is_sector": report.is_sector,
                   "alpha_min": _finite_or_none(report.alpha_min)},
    }
    if hermitian:
        sym = linalg.hermitian_part(mat)
        ppt = blockops.ppt_test(h.with_mat(sym))
        out["eigenvalues"] = [float(x) for x in linalg.hermitian_eigs(sym, check=False)]
        out["partial_transpose_eigenvalues"] = [
            float(x) for x in linalg.hermitian_eigs(linalg.hermitian_part(tau.mat), check=False)]
        out["psd"] = ppt.psd.to_dict()
        out["ppt"] = ppt.to_dict()
    else:
        out["eigenvalues"] = complex_json(np.linalg.eigvals(mat))
        out["psd"] = {"is_psd": False, "reason": "not Hermitian"}
        out["ppt"] = {"ppt": False, "reason": "not Hermitian"}
    return out


def cmd_analyze(args) -> int:
    h = read_matrix_file(args.input)
    emit(dump(analyze(h)), args.out)
    return EXIT_PASS


def _params(args) -> dict:
    return {name: getattr(args, name) for name in ("alpha", "q", "r", "t")
            if getattr(args, name, None) is not None}


def cmd_check(args) -> int:
    tol = slack_from_env()
    registry.get_case(args.ineq)
    h = read_matrix_file(args.input)
    result = registry.evaluate_check(args.ineq, h, _params(args), tol)
    emit(dump(result.to_dict()), args.out)
    return EXIT_PASS if result.passed else EXIT_VIOLATION


def _spec(args) -> randgen.GenSpec:
    return randgen.GenSpec(args.cls, args.n, args.k,
                           alpha=args.alpha if args.alpha is not None else 0.0,
                           seed=args.seed, scale=args.scale,
                           well_conditioned=args.well_conditioned)


def cmd_fuzz(args) -> int:
    tol = slack_from_env()
    spec = _spec(args)
    params = {name: getattr(args, name) for name in ("q", "r", "t")
              if getattr(args, name) is not None} or None
    report = fuzzing.fuzz(args.ineq, spec, args.trials, params=params, tol=tol,
                           workers=args.workers)
    emit(dump(report.to_dict()), args.out)
    if args.worst_out and report.worst_input is not None:
        write_matrix_file(args.worst_out, report.worst_input)
    if args.out:
        print(f"{report.case}: {report.trials} trials, {report.failures} failures, "
              f"min margin {report.min_margin:.3e}")
    return EXIT_PASS if report.failures == 0 else EXIT_VIOLATION


def cmd_gen(args) -> int:
    h = randgen.generate(_spec(args))
    emit(format_matrix_file(h), args.out)
    return EXIT_PASS


def cmd_list(args) -> int:
    rows = [{"id": c.id, "hypothesis": c.hypothesis,
             "params": list(c.params), "statement": c.statement}
            for c in (registry.REGISTRY[i] for i in registry.case_ids())]
    emit(dump(rows), None)
    return EXIT_PASS


def _q(text: str):
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid Schatten order {text!r}") from None


def _gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--class", dest="cls", required=True, choices=randgen.CLASSES)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--well-conditioned", action="store_true",
                   help="add 0.1 I to psd/density draws")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocktrace",
        description="Partial traces, block-matrix inequalities and seeded fuzzing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="dump block functionals of a MatrixFile")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("check", help="evaluate one registry inequality on a MatrixFile")
    p.add_argument("--ineq", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--q", type=_q)
    p.add_argument("--r", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fuzz", help="fuzz an inequality (or all) on seeded draws")
    p.add_argument("--ineq", required=True)
    _gen_flags(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--q", type=_q)
    p.add_argument("--r", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--worst-out", help="also write the worst failing input as a MatrixFile")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("gen", help="write one seeded draw as a MatrixFile")
    _gen_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("list", help="list registry entries")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except BlockTraceError as exc:
        print(f"blocktrace: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"blocktrace: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # keep exit code 1 reserved for violations
        print(f"blocktrace: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
