import json

import pytest

from irrhodge import filtcx
from irrhodge.cli import (
    PlanError, RunPlan, TaskSpec, fuzz_filtered, load_plan, main, render, run,
)

UV_TASK = {"kind": "p1-uv", "params": {"f": {"num": [1, 0, 1], "den": [0, 1]}, "name": "z + 1/z"}}


def test_uv_plan_report(tmp_path):
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"tasks": [UV_TASK]}))
    out = tmp_path / "r.json"
    assert main(["run", "--plan", str(plan), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["passed"]
    assert rep["tasks"][0]["checks"][0]["data"]["dims"] == [[0, 2, 0]] * 5


def test_planted_filtcx_exits_nonzero_with_witness(tmp_path, capsys):
    assert main(["filtcx-check", "--params", '{"example": "planted"}']) == 1
    rep = json.loads(capsys.readouterr().out)
    check = rep["tasks"][0]["checks"][0]
    assert not check["passed"]
    assert check["data"]["witnesses"][0] == {"lambda": [1, 1], "degree": 1, "class": [[1, 1]]}


def test_empty_plan(tmp_path, capsys):
    plan = tmp_path / "e.toml"
    plan.write_text("tasks = []\n")
    assert main(["run", "--plan", str(plan)]) == 0
    assert json.loads(capsys.readouterr().out)["tasks"] == []


def test_schema_errors(tmp_path):
    with pytest.raises(PlanError):
        RunPlan.from_dict({"tasks": [{"kind": "bogus"}]})
    with pytest.raises(PlanError):
        RunPlan.from_dict({"tasks": [], "extra": 1})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"tasks": [{"kind": "p1-uv", "params": {}}]}))
    assert main(["run", "--plan", str(bad)]) == 2


def test_determinism():
    plan = RunPlan([TaskSpec("filtcx-fuzz", {"count": 15}), TaskSpec(**UV_TASK)], seed=3)
    assert render(run(plan)) == render(run(plan))
    other = RunPlan([TaskSpec("filtcx-fuzz", {"count": 15})], seed=4)
    assert render(run(other)) != render(run(RunPlan([TaskSpec("filtcx-fuzz", {"count": 15})], seed=3)))


def test_formats():
    rep = run(RunPlan([TaskSpec("filtcx-check", {"example": "planted"})]))
    csv_text = render(rep, "csv")
    assert csv_text.splitlines()[0] == "task,kind,check,verdict,mode,summary"
    assert "FAIL" in csv_text.splitlines()[1]
    assert render(rep, "text").strip().endswith("overall: FAIL")


def test_fuzz_statistics():
    st = fuzz_filtered(1, 40)
    assert st.consistent == 40 and not st.counterexamples


def test_fuzz_surfaces_corrupted_checker():
    def broken(f):
        r = filtcx.triple_equivalence(f)
        return filtcx.EquivalenceCheck(not r.degenerate, r.e1_total, r.h_total, r.torsion_free)

    st = fuzz_filtered(1, 5, checker=broken)
    assert st.consistent == 0 and len(st.counterexamples) == 5
    assert "complex" in st.counterexamples[0]


def test_fuzz_zero_complex():
    def zero_only(_f):
        base = filtcx.CochainComplex.from_dense(filtcx.QQ, 0, [0], [])
        return filtcx.triple_equivalence(filtcx.FilteredCochainComplex.trivial(base))

    assert fuzz_filtered(0, 1, checker=zero_only).consistent == 1
    with pytest.raises(ValueError):
        fuzz_filtered(0, 0)


def test_invalid_lift_task_fails_with_residual(capsys):
    params = {"p": 3, "atlas": "An", "n": 2, "ell": 2, "m": 2,
              "perturbations": [{"chart": 0, "coord": 0, "v": [[[0, 0], 1]], "shape": "multiplicative"}]}
    assert main(["charp-splitting", "--params", json.dumps(params)]) == 1
    checks = {c["name"]: c for c in json.loads(capsys.readouterr().out)["tasks"][0]["checks"]}
    assert checks["lift_conditions"]["data"]["residual"]["residual"] == "3*x0^3*x1^3"
    assert checks["u_sum"]["data"]["failures"][0]["residual"] == "p*(1)"


def test_charp_p1_task_with_perturbation():
    params = {"p": 5, "atlas": "P1", "perturbations": [{"chart": 0, "coord": 0, "v": [[[1], 1]]}]}
    rep = run(RunPlan([TaskSpec("charp-splitting", params)]))
    assert rep["passed"] and rep["tasks"][0]["results"]["phi_zero"] is False


def test_local_verify_small(capsys):
    params = {"charts": [{"ell": 1, "m": 0, "pz": 0, "e": [2]}], "radius": 3, "lambdas": ["-1", "-1/2"]}
    assert main(["local-verify", "--params", json.dumps(params), "--format", "text"]) == 0
    assert "gr_acyclic" in capsys.readouterr().out


def test_example_plans_parse():
    import glob
    import os
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    plans = glob.glob(os.path.join(here, "plans", "*"))
    assert plans
    for p in plans:
        load_plan(p)
