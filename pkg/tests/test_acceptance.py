"""Acceptance criteria 1-7, one PASS/FAIL line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines next to the
pytest progress. Criterion 5 contains the full local sweep and dominates the
runtime.
"""
from fractions import Fraction

import pytest

from irrhodge import cli, localmodel, p1global
from irrhodge.cli import RunPlan, TaskSpec

# dim H^1_dR from -chi(U) + sum of pole orders, and the known jump multisets
EXPECTED_H1 = {"z on A1": 0, "z on Gm": 1, "z + 1/z": 2, "z^2 on A1": 1, "z^2/(z-1)": 2, "z^3/(z-1)": 3}
EXPECTED_JUMPS = {"z on A1": [], "z on Gm": ["1"], "z + 1/z": ["0", "1"], "z^2 on A1": ["1/2"],
                  "z^2/(z-1)": ["0", "1"], "z^3/(z-1)": ["0", "1/2", "1"]}


def report(capsys, n: int, ok: bool, detail: str = "") -> None:
    with capsys.disabled():
        print("\ncriterion %d: %s %s" % (n, "PASS" if ok else "FAIL", detail))


@pytest.fixture(scope="module")
def instances():
    return p1global.standard_instances()


def test_criterion_1_filtered_equivalence(capsys):
    st = cli.fuzz_filtered(seed=2024, count=200)
    ok = st.consistent == 200
    report(capsys, 1, ok, "%d/200 consistent, %d degenerate" % (st.consistent, st.degenerate))
    assert ok, st.counterexamples[:1]
    # both branches of the equivalence are exercised
    assert 0 < st.degenerate < 200


def test_criterion_2_irregular_hodge(capsys, instances):
    ok = True
    for prob in instances:
        for k in (0, 1, 2):
            rep = p1global.irregular_hodge(prob, k)
            ok = ok and rep.passed and rep.certificate.stable
            if k == 1:
                ok = ok and rep.dim_H == EXPECTED_H1[prob.name]
                ok = ok and [str(j) for j in rep.jumps] == EXPECTED_JUMPS[prob.name]
            else:
                ok = ok and rep.dim_H == 0
    report(capsys, 2, ok, "%d instances, k = 0, 1, 2" % len(instances))
    assert ok


def test_criterion_3_uv_independence(capsys, instances):
    ok = True
    count = 0
    for prob in instances:
        for alpha in p1global.alpha_grid(prob):
            rep = p1global.verify_uv_independence(prob, alpha)
            count += 1
            ok = ok and rep.passed and rep.oracle == (0, EXPECTED_H1[prob.name])
            ok = ok and len(rep.table) == 5
    report(capsys, 3, ok, "%d (instance, alpha) pairs" % count)
    assert ok


def test_criterion_4_decomposition(capsys, instances):
    ok = True
    for prob in instances:
        for alpha in p1global.alpha_grid(prob):
            for k in (0, 1, 2):
                ok = ok and p1global.decomposition_check(prob, alpha, k).passed
    kl = next(p for p in instances if p.name == "z + 1/z")
    rep = p1global.decomposition_check(kl, 0, 1)
    derived = rep.dim_dR == 2 and rep.degrees == (-2, 0) and rep.terms == {"h^1(Omega_f^0)": 1, "h^0(Omega_f^1)": 1}
    report(capsys, 4, ok and derived, "z + 1/z, k=1: %s" % rep.terms)
    assert ok and derived


@pytest.fixture(scope="module")
def local_sweep():
    checks, meta = cli.task_local_verify({}, {})
    return {c.name: c for c in checks}, meta


def test_criterion_5_local_model(capsys, local_sweep):
    checks, meta = local_sweep
    ok = all(c.passed for c in checks.values())
    gr = checks["gr_acyclic"]
    report(capsys, 5, ok, "%d charts; failing gr_acyclic lambdas: %s"
           % (meta["charts"], gr.data.get("details", {}).get("failing_lambdas")))
    assert meta["charts"] == len(localmodel.chart_family(3, 3))
    for name in ("kont_log", "gr_support", "C1", "lemma"):
        assert checks[name].passed, checks[name].data.get("failures", [])[:1]
    # gr^0 contains Omega_f^0 = x O in degree 0, so acyclicity fails exactly at lambda = 0
    fl = gr.data["details"]["failing_lambdas"]
    assert set(fl) == {"0"} and fl["0"] == meta["charts"]


@pytest.mark.xfail(strict=True, reason="gr^0 has H^0 = Omega_f^0 on every chart; see the decisions ledger")
def test_criterion_5_gr_acyclic_at_zero(local_sweep):
    checks, _ = local_sweep
    assert checks["gr_acyclic"].passed


CHARP_TASKS = [
    TaskSpec("charp-cartier", {"p": p, "atlas": "An", "n": n, "ell": ell, "m": m})
    for p in (3, 5) for n, ell, m in ((1, 1, 1), (2, 1, 1), (2, 1, 2), (2, 2, 2))
] + [
    TaskSpec("charp-splitting", {"p": p, "atlas": "P1"}) for p in (3, 5)
] + [
    TaskSpec("charp-splitting", {"p": p, "atlas": "P1", "horizontal": True,
                                 "perturbations": [{"chart": 0, "coord": 0, "v": [[[1], 1]], "shape": "multiplicative"}]})
    for p in (3, 5)
] + [
    TaskSpec("charp-splitting", {"p": p, "atlas": "An", "n": 2, "ell": 2, "m": 2}) for p in (3, 5)
] + [
    TaskSpec("charp-splitting", {
        "p": p, "atlas": "An", "n": 2, "ell": 2, "m": 2, "copies": 2,
        "perturbations": [{"chart": 1, "coord": 0, "v": [[[1, 0], 1]], "shape": "multiplicative"},
                          {"chart": 1, "coord": 1, "v": [[[1, 0], -1]], "shape": "multiplicative"}]})
    for p in (3, 5)
]


def test_criterion_6_charp(capsys):
    rep = cli.run(RunPlan(CHARP_TASKS))
    names = {c["name"] for t in rep["tasks"] for c in t["checks"]}
    perturbed = [t for t in rep["tasks"] if t["kind"] == "charp-splitting" and not t["results"]["phi_zero"]]
    ok = rep["passed"] and len(perturbed) == 4
    ok = ok and {"closed_intersection", "cartier_iso", "u_sum", "splitting_a", "splitting_b", "splitting_c",
                 "splitting_d", "degeneration_dims"} <= names
    ok = ok and all(t["results"]["i_max"] == 2 for t in rep["tasks"]
                    if t["kind"] == "charp-splitting" and t["results"]["atlas"]["kind"] == "An")
    failed = [(t["kind"], c["name"]) for t in rep["tasks"] for c in t["checks"] if not c["passed"]]
    report(capsys, 6, ok, "%d tasks, failed: %s" % (len(rep["tasks"]), failed))
    assert ok


def test_criterion_7_negative_controls(capsys):
    planted = cli.run(RunPlan([TaskSpec("filtcx-check", {"example": "planted"})]))
    chk = planted["tasks"][0]["checks"][0]
    planted_ok = not planted["passed"] and not chk["passed"] and chk["data"]["witnesses"]
    lift = cli.run(RunPlan([TaskSpec("charp-splitting", {
        "p": 3, "atlas": "An", "n": 2, "ell": 2, "m": 2,
        "perturbations": [{"chart": 0, "coord": 0, "v": [[[0, 0], 1]], "shape": "multiplicative"}]})]))
    lc = {c["name"]: c for c in lift["tasks"][0]["checks"]}
    lift_ok = (not lift["passed"] and not lc["lift_conditions"]["passed"]
               and lc["lift_conditions"]["data"]["residual"]["residual"] == "3*x0^3*x1^3"
               and lc["u_sum"]["data"]["failures"][0]["residual"] == "p*(1)")
    ok = bool(planted_ok and lift_ok)
    report(capsys, 7, ok, "planted witness %s; lift residuals reported" % chk["data"]["witnesses"][:1])
    assert ok


def test_fraction_grid_sanity():
    # alpha grid includes the fractional jumps for the instances with e = 2 at a pole
    grids = {p.name: p1global.alpha_grid(p) for p in p1global.standard_instances()}
    assert grids["z^2 on A1"] == [Fraction(0), Fraction(1, 2)]
