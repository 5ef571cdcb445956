import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from blocktrace import blockops
from blocktrace.blockops import BlockMatrix
from blocktrace.errors import DomainError, UsageError
from blocktrace.harness import outcome, registry
from blocktrace.harness.registry import REGISTRY, evaluate_check, run_case
from blocktrace.randgen import GenSpec, generate, generate_trials

from conftest import BELL


def tr1(h):
    return sum(h.block(i, i) for i in range(h.n))


def tr2(h):
    return np.array([[np.trace(h.block(i, j)) for j in range(h.n)] for i in range(h.n)])


def det(m):
    return np.linalg.det(m)


def absdet(m):
    return abs(np.linalg.det(m))


def trace_abs(m):
    return np.linalg.svd(m, compute_uv=False).sum()


# (lhs, rhs) of the first part straight from the statement, on raw input
ORACLES = {
    "fischer": lambda h, n, k, p: (np.prod([det(h.block(i, i)).real for i in range(n)]),
                                   det(h.mat).real),
    "fm": lambda h, n, k, p: ((det(tr2(h)).real / k) ** k, det(h.mat).real),
    "lin-tr1": lambda h, n, k, p: ((det(tr1(h)).real / n) ** n, det(h.mat).real),
    "fm-strong": lambda h, n, k, p: ((det(tr2(h)).real / k ** n) ** k, det(h.mat).real),
    "lin-strong": lambda h, n, k, p: ((det(tr1(h)).real / n ** k) ** n, det(h.mat).real),
    "fan-ky": lambda h, n, k, p: (det(tr1(h) / n).real,
                                  np.prod([det(h.block(i, i)).real for i in range(n)]) ** (1 / n)),
    "kuai-tr2": lambda h, n, k, p: ((absdet(tr2(h)) / k ** n) ** k,
                                    math.cos(p["alpha"]) ** (n * k) * absdet(h.mat)),
    "kuai-tr1": lambda h, n, k, p: ((absdet(tr1(h)) / n) ** n,
                                    math.cos(p["alpha"]) ** ((3 * n - 2) * k) * absdet(h.mat)),
    "li-sector-tr1": lambda h, n, k, p: ((absdet(tr1(h)) / n ** k) ** n,
                                         math.cos(p["alpha"]) ** (n * k) * absdet(h.mat)),
    "lin15-sector-det": lambda h, n, k, p: (
        det(0.5 * (h.mat + h.mat.conj().T)).real / math.cos(p["alpha"]) ** (n * k),
        absdet(h.mat)),
    "lin-det-sum": lambda h, n, k, p: (np.trace(h.mat).real ** (n * k) + det(h.mat).real,
                                       det(tr1(h)).real ** n + det(tr2(h)).real ** k),
    "prop46-1": lambda h, n, k, p: (np.trace(h.mat).real ** (n * k) + det(tr1(h)).real ** n,
                                    det(h.mat).real + det(tr2(h)).real ** k),
    "prop46-2": lambda h, n, k, p: (np.trace(h.mat).real ** (n * k) + det(tr2(h)).real ** k,
                                    det(h.mat).real + det(tr1(h)).real ** n),
    "thm47-1": lambda h, n, k, p: (np.trace(h.mat).real ** (n * k) + det(tr1(h)).real ** n,
                                   n ** (n * k) * (det(h.mat).real + det(tr2(h)).real ** k)),
    "thm47-2": lambda h, n, k, p: (np.trace(h.mat).real ** (n * k) + det(tr2(h)).real ** k,
                                   k ** (n * k) * (det(h.mat).real + det(tr1(h)).real ** n)),
    "ylc-sector": lambda h, n, k, p: (
        trace_abs(h.mat) ** (n * k) + absdet(h.mat),
        math.cos(p["alpha"]) ** (n * k) * (absdet(tr1(h)) ** n + absdet(tr2(h)) ** k)),
    "thm48-1": lambda h, n, k, p: (
        trace_abs(h.mat) ** (n * k) + absdet(tr1(h)) ** n,
        (n * math.cos(p["alpha"])) ** (n * k) * (absdet(h.mat) + absdet(tr2(h)) ** k)),
    "thm48-2": lambda h, n, k, p: (
        trace_abs(h.mat) ** (n * k) + absdet(tr2(h)) ** k,
        (k * math.cos(p["alpha"])) ** (n * k) * (absdet(h.mat) + absdet(tr1(h)) ** n)),
    "choi-cross": lambda h, n, k, p: (det(tr1(h)).real,
                                      sum(det(h.block(i, i)).real for i in range(n))),
    "audenaert": lambda h, n, k, p: (
        np.trace(h.mat).real + np.linalg.norm(h.mat, "nuc"),
        np.linalg.norm(tr1(h), "nuc") + np.linalg.norm(tr2(h), "nuc")),
    "kl-trace-1": lambda h, n, k, p: (
        np.trace(h.block(0, 0)).real * np.trace(h.block(1, 1)).real
        - abs(np.trace(h.block(0, 1))) ** 2,
        abs(np.trace(h.block(0, 0) @ h.block(1, 1))
            - np.trace(h.block(0, 1).conj().T @ h.block(0, 1)))),
    "kl-trace-2": lambda h, n, k, p: (
        np.trace(h.block(0, 0)).real * np.trace(h.block(1, 1)).real
        + abs(np.trace(h.block(0, 1))) ** 2,
        (np.trace(h.block(0, 0) @ h.block(1, 1))
         + np.trace(h.block(0, 1).conj().T @ h.block(0, 1))).real),
}

ORACLE_PARAMS = {"audenaert": {"q": 1}}


def draw(case, n=2, k=2, seed=11):
    cls = {"psd": "psd", "sector": "sector", "general": "general"}[case.hypothesis]
    return generate(GenSpec(cls, n, k, alpha=0.6 if cls == "sector" else 0.0, seed=seed))


def params_for(case, k=2):
    p = dict(case.grid(2, k)[0])
    if case.hypothesis == "sector":
        p["alpha"] = 0.6
    return p


class TestExamples:
    def test_fm_strong_identity(self):
        out = evaluate_check("fm-strong", BlockMatrix(2, 2, np.eye(4)))
        assert (out.lhs, out.rhs, out.margin, out.passed) == (1.0, 1.0, 0.0, True)

    def test_kl_trace_1_bell_equality(self):
        out = evaluate_check("kl-trace-1", BlockMatrix(2, 2, BELL))
        assert out.lhs == pytest.approx(1.0) and out.rhs == pytest.approx(1.0)
        assert out.margin == pytest.approx(0.0, abs=1e-12) and out.passed

    def test_lin_det_sum_identity(self):
        out = evaluate_check("lin-det-sum", BlockMatrix(2, 2, np.eye(4)))
        assert out.lhs == pytest.approx(257.0, rel=1e-12)
        assert out.rhs == pytest.approx(32.0, rel=1e-12)
        assert out.passed


class TestOracles:
    @pytest.mark.parametrize("case_id", sorted(ORACLES))
    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2)])
    def test_matches_direct_formula(self, case_id, dims):
        case = REGISTRY[case_id]
        n, k = dims
        if case.reason_inapplicable(n, k):
            pytest.skip("dims not applicable")
        h = draw(case, n, k)
        p = dict(ORACLE_PARAMS.get(case_id, {}))
        if case.hypothesis == "sector":
            p["alpha"] = 0.6
        want_l, want_r = ORACLES[case_id](h, n, k, p)
        res = run_case(case, h, p, rescale=False)
        part = next(iter(res.parts.values()))
        assert part.lhs[0] == pytest.approx(want_l, rel=1e-8, abs=1e-12)
        assert part.rhs[0] == pytest.approx(want_r, rel=1e-8, abs=1e-12)
        out = evaluate_check(case_id, h, p)
        assert out.to_dict()["parts"][0]["lhs"] == pytest.approx(want_l, rel=1e-8, abs=1e-12)

    def test_loewner_margin_is_min_eig(self, rng):
        h = draw(REGISTRY["ando-lowner"], 2, 3)
        t1, t2 = tr1(h), tr2(h)
        big = np.trace(h.mat).real * np.eye(6) + h.mat
        small = np.kron(np.eye(2), t1) + np.kron(t2, np.eye(3))
        out = evaluate_check("ando-lowner", h)
        assert out.margin == pytest.approx(np.linalg.eigvalsh(big - small).min(), rel=1e-9)
        assert out.kind == "loewner"
        assert len(out.parts[0]["eigenvalues"]) == 6

    def test_choi_lowner_variants(self):
        h = draw(REGISTRY["choi-lowner-tr2-plus"], 2, 2)
        tau = blockops.partial_transpose(h).mat
        big = np.kron(tr2(blockops.partial_transpose(h)), np.eye(2))
        out = evaluate_check("choi-lowner-tr2-minus", h)
        assert out.margin == pytest.approx(np.linalg.eigvalsh(big + tau).min(), rel=1e-9)


class TestHomogeneity:
    """Declared degrees: lhs(cH) = c^d lhs(H) when evaluated without rescaling."""

    @pytest.mark.parametrize("case_id", sorted(REGISTRY))
    def test_degree(self, case_id):
        case = REGISTRY[case_id]
        n = 4 if case_id == "lin-lemma" else (3 if case_id == "det-3sum" else 2)
        h = draw(case, n, 2, seed=5)
        if case.prepare:
            h = case.prepare(h.with_mat(h.mat[None]))[0]
        p = params_for(case)
        base = run_case(case, h, p, rescale=False)
        c = 1.7
        scaled = run_case(case, h.with_mat(c * h.mat), p, rescale=False)
        degrees = registry.part_degrees(case, n, 2, p)
        for i, (name, part) in enumerate(base.parts.items()):
            d = degrees[min(i, len(degrees) - 1)]
            other = scaled.parts[name]
            if d is None or part.kind in ("identity", "vacuous") or part.log_domain[0]:
                continue
            if name.endswith("re-pd"):
                continue
            assert other.lhs[0] == pytest.approx(c ** d * part.lhs[0], rel=1e-8, abs=1e-9)

    @pytest.mark.parametrize("case_id", sorted(REGISTRY))
    def test_verdict_scale_invariant(self, case_id):
        case = REGISTRY[case_id]
        n = 4 if case_id == "lin-lemma" else (3 if case_id == "det-3sum" else 2)
        h = draw(case, n, 2, seed=6)
        if case.prepare:
            h = case.prepare(h.with_mat(h.mat[None]))[0]
        p = params_for(case)
        a = evaluate_check(case_id, h, p)
        b = evaluate_check(case_id, h.with_mat(1e3 * h.mat), p)
        assert a.passed == b.passed
        assert a.relative_margin == pytest.approx(b.relative_margin, rel=1e-6, abs=1e-9)


class TestErrors:
    def test_unknown_id(self):
        with pytest.raises(UsageError, match="unknown"):
            evaluate_check("no-such", BlockMatrix(2, 2, np.eye(4)))

    def test_not_psd(self):
        with pytest.raises(DomainError, match="input not PSD at tol 1e-09"):
            evaluate_check("fm", BlockMatrix(2, 2, np.diag([1.0, 1.0, 1.0, -1.0])))

    def test_not_hermitian(self):
        m = np.eye(4, dtype=complex)
        m[0, 1] = 1.0
        with pytest.raises(DomainError, match="not Hermitian"):
            evaluate_check("fm", BlockMatrix(2, 2, m))

    def test_bell_not_sector(self):
        with pytest.raises(DomainError, match="not a sector matrix"):
            evaluate_check("li-sector-tr1", BlockMatrix(2, 2, BELL))

    def test_sector_alpha_too_small(self):
        h = generate(GenSpec("sector", 2, 2, alpha=1.0, seed=1))
        with pytest.raises(DomainError, match="sector"):
            evaluate_check("kuai-tr2", h, {"alpha": 0.5})

    def test_inapplicable_dims(self):
        with pytest.raises(DomainError, match="n = 2"):
            evaluate_check("kl-trace-1", BlockMatrix(3, 2, np.eye(6)))

    @pytest.mark.parametrize("case_id,params,match", [
        ("audenaert", {}, "requires parameter"),
        ("audenaert", {"q": 4}, "Schatten"),
        ("kl-elem-t", {"t": 3}, "exceeds"),
        ("kl-tensor-r", {"r": 0}, "positive integer"),
        ("fm", {"alpha": 0.3}, "no parameter"),
        ("kuai-tr2", {"alpha": 2.0}, "alpha"),
    ])
    def test_bad_params(self, case_id, params, match):
        h = BlockMatrix(2, 2, np.eye(4))
        with pytest.raises(UsageError, match=match):
            evaluate_check(case_id, h, params)


class TestSpecialCases:
    def test_sector_alpha_defaults_to_own_angle(self):
        h = generate(GenSpec("sector", 2, 2, alpha=0.8, seed=2))
        out = evaluate_check("kuai-tr2", h)
        assert out.params["alpha"] == pytest.approx(0.8, abs=1e-6)
        assert out.passed

    def test_lin_lemma_prepare_meets_premises(self):
        h = generate_trials(GenSpec("psd", 4, 2, seed=3), np.arange(50))
        res = run_case(REGISTRY["lin-lemma"], registry.lin_lemma_prepare(h))
        assert res.passed.all()

    def test_lin_lemma_rejects_bad_premise(self):
        m = np.zeros((8, 8), dtype=complex)
        m[2:4, 2:4] = np.eye(2)
        m[4:6, 4:6] = 5 * np.eye(2)  # W > X
        with pytest.raises(DomainError, match="premise"):
            evaluate_check("lin-lemma", BlockMatrix(4, 2, m))

    def test_rotfeld_vacuous_determinant_part(self):
        out = evaluate_check("rotfeld-parts", BlockMatrix(2, 2, -np.eye(4) + 0.5j * np.eye(4)))
        det_part = [p for p in out.parts if p["part"] == "determinant"][0]
        assert det_part["margin"] is None and det_part["pass"]

    def test_identity_entries(self, rng):
        h = BlockMatrix(3, 2, rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
        for cid in ("phi-commute", "pauli-identity"):
            out = evaluate_check(cid, h)
            assert out.passed and abs(out.margin) <= 1e-12

    def test_log_domain_engages(self):
        # reported in input units, det terms of a 1e50-scaled 16x16 input exceed e^700
        h = generate(GenSpec("psd", 4, 4, seed=4, scale=1e50))
        out = evaluate_check("fm", h)
        assert out.log_domain and out.passed
        ref = evaluate_check("fm", h.with_mat(h.mat / 1e50))
        assert out.margin == pytest.approx(math.log(ref.lhs / ref.rhs), rel=1e-9)

    def test_kuai_and_li_both_pass(self):
        # which bound is tighter is recorded, not asserted
        h = generate_trials(GenSpec("sector", 2, 3, alpha=1.0, seed=8), np.arange(200))
        a = run_case(REGISTRY["kuai-tr1"], h, {"alpha": 1.0})
        b = run_case(REGISTRY["li-sector-tr1"], h, {"alpha": 1.0})
        assert a.passed.all() and b.passed.all()


class TestOutcome:
    def test_from_logs_small(self):
        p = outcome.from_logs([np.log([2.0]), np.log([3.0])], [np.log([4.0])])
        assert p.lhs[0] == pytest.approx(5.0) and p.margin[0] == pytest.approx(1.0)
        assert not p.log_domain[0]

    def test_from_logs_large(self):
        p = outcome.from_logs([np.array([800.0]), np.array([800.0])], [np.array([800.5])])
        assert p.log_domain[0]
        assert p.margin[0] == pytest.approx(math.log(2) - 0.5)

    def test_zero_terms(self):
        p = outcome.from_logs([np.array([-np.inf])], [np.array([-np.inf])])
        assert p.margin[0] == 0 and p.passed(1e-8)[0]

    def test_pass_rule(self):
        p = outcome.scalar(np.array([100.0]), np.array([100.0 + 5e-7]))
        assert p.passed(1e-8)[0]
        p = outcome.scalar(np.array([100.0]), np.array([100.0 + 2e-6]))
        assert not p.passed(1e-8)[0]

    def test_rescale_preserves_relative(self):
        p = outcome.scalar(np.array([3.0]), np.array([2.0]))
        q = outcome.rescale(p, np.array([math.log(10.0)]))
        assert q.lhs[0] == pytest.approx(30.0) and q.relative[0] == pytest.approx(p.relative[0])

    def test_rescale_to_log_domain(self):
        p = outcome.scalar(np.array([3.0]), np.array([2.0]))
        q = outcome.rescale(p, np.array([900.0]))
        assert q.log_domain[0] and q.margin[0] == pytest.approx(math.log(1.5))

    def test_json_infinite_q(self):
        out = evaluate_check("audenaert", BlockMatrix(2, 2, np.eye(4)), {"q": math.inf})
        assert out.to_dict()["params"]["q"] == "inf"


@given(st.integers(0, 2**63), st.sampled_from(["fm", "lin-tr1", "fischer", "choi-fm",
                                                "det-3sum", "ando-lowner"]))
def test_psd_entries_hold(seed, case_id):
    n = 3 if case_id == "det-3sum" else 2
    h = generate(GenSpec("psd", n, 3, seed=seed))
    assert evaluate_check(case_id, h).passed
