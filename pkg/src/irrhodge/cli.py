"""Batch driver: run verification tasks from a plan file and emit JSON, CSV or text reports.

Exit status is 0 when every asserted check passes, 1 when one fails and 2 on a malformed plan.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

from . import charp, filtcx, localmodel, p1global
from .exactalg import field_from_name

TASK_KINDS = ("local-verify", "p1-hodge", "p1-degeneration", "p1-uv", "charp-cartier", "charp-splitting",
              "filtcx-fuzz", "filtcx-check")
FORMATS = ("json", "csv", "text")


class PlanError(ValueError):
    """The plan does not match the schema."""


@dataclass
class TaskSpec:
    kind: str
    params: dict = dc_field(default_factory=dict)


@dataclass
class RunPlan:
    """A list of tasks plus global options.

    Attributes:
        tasks: tasks in report order.
        seed: base seed for randomised tasks.
        truncation: Cech window override for P^1 tasks.
        output: optional {"path": ..., "format": ...}.
    """

    tasks: List[TaskSpec] = dc_field(default_factory=list)
    seed: int = 0
    truncation: Optional[int] = None
    output: dict = dc_field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "RunPlan":
        if not isinstance(d, dict):
            raise PlanError("plan must be a mapping")
        unknown = set(d) - {"tasks", "seed", "truncation", "output"}
        if unknown:
            raise PlanError("unknown plan keys: %s" % sorted(unknown))
        tasks = []
        for i, t in enumerate(d.get("tasks", [])):
            if not isinstance(t, dict) or t.get("kind") not in TASK_KINDS:
                raise PlanError("task %d: kind must be one of %s" % (i, ", ".join(TASK_KINDS)))
            params = t.get("params", {})
            if not isinstance(params, dict):
                raise PlanError("task %d: params must be a mapping" % i)
            tasks.append(TaskSpec(t["kind"], params))
        out = d.get("output", {})
        if out.get("format", "json") not in FORMATS:
            raise PlanError("output format must be one of %s" % (FORMATS,))
        trunc = d.get("truncation")
        return cls(tasks, int(d.get("seed", 0)), int(trunc) if trunc is not None else None, out)


def load_document(path: str) -> dict:
    """Read a JSON or TOML file (chosen by extension)."""
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path) as fh:
        return json.load(fh)


def load_plan(path: str) -> RunPlan:
    return RunPlan.from_dict(load_document(path))


# ---------------------------------------------------------------------------
# Checks and task results
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    asserted: bool = True
    data: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "asserted": self.asserted, "data": self.data}


def _verdict_check(name: str, v: localmodel.Verdict, asserted: bool = True) -> Check:
    return Check(name, v.passed, asserted, v.to_json())


def _frac(x) -> Fraction:
    return Fraction(x) if not isinstance(x, (list, tuple)) else Fraction(int(x[0]), int(x[1]))


def _problems(params: dict) -> List[p1global.P1Problem]:
    field = field_from_name(params.get("field", "QQ"))
    if params.get("instances") == "standard":
        return p1global.standard_instances(field)
    if "problems" in params:
        return [p1global.problem_from_json(d, field) for d in params["problems"]]
    if "f" in params:
        return [p1global.problem_from_json(params, field)]
    raise PlanError("P^1 task needs 'f', 'problems' or instances = 'standard'")


def _alphas(params: dict, problem: p1global.P1Problem) -> List[Fraction]:
    a = params.get("alpha", "grid")
    if a == "grid":
        return p1global.alpha_grid(problem)
    return [_frac(x) for x in (a if isinstance(a, list) else [a])]


def _pname(problem: p1global.P1Problem) -> str:
    return problem.name or json.dumps(problem.to_json(), sort_keys=True, default=str)


# ---------------------------------------------------------------------------
# Task handlers: each returns (checks, results)
# ---------------------------------------------------------------------------


def _local_charts(params: dict) -> List[localmodel.ChartData]:
    charts = params.get("charts", "family")
    if charts == "family":
        return localmodel.chart_family(int(params.get("max_dim", 3)), int(params.get("max_e", 3)))
    return [localmodel.ChartData.from_json(c) for c in charts]


def _support_lambdas(chart: localmodel.ChartData) -> List[Fraction]:
    out = set()
    for e in chart.e:
        for j in range(-e, e + 1):
            lam = Fraction(j, e)
            if lam.denominator != 1:
                out.add(lam)
    return sorted(out)


LOCAL_CHECKS = ("kont_log", "gr_acyclic", "gr_support", "C1", "lemma")


def local_chart_report(chart: localmodel.ChartData, params: dict) -> Dict[str, localmodel.Verdict]:
    """All local checks on one chart, one verdict per check kind."""
    radius = int(params.get("radius", 6))
    window = localmodel.window_l1(chart.n, radius)
    checks = params.get("checks", list(LOCAL_CHECKS))
    out: Dict[str, localmodel.Verdict] = {}
    tag = chart.to_json()
    if "kont_log" in checks:
        v = localmodel.Verdict("kont_log")
        for mu in [_frac(x) for x in params.get("mu", ["0", "1/3", "1/2", "2/3"])]:
            for p in range(chart.n + 1):
                r = localmodel.verify_kont_log(chart, mu, p, window)
                for f in r.failures:
                    f.update({"chart": tag, "mu": str(mu), "p": p})
                v.merge(r)
        out["kont_log"] = v
    if "gr_acyclic" in checks:
        v = localmodel.Verdict("gr_acyclic")
        bad = []
        for lam in [_frac(x) for x in params.get("lambdas", ["-1", "-2/3", "-1/2", "-1/3", "0"])]:
            r = localmodel.verify_gr_acyclic(chart, lam, window)
            if not r.passed:
                bad.append(str(lam))
                r.failures = r.failures[:1]
                for f in r.failures:
                    f.update({"chart": tag, "lambda": str(lam)})
            v.merge(r)
        v.details["failing_lambdas"] = bad
        out["gr_acyclic"] = v
    if "gr_support" in checks:
        v = localmodel.Verdict("gr_support")
        for lam in _support_lambdas(chart):
            r = localmodel.verify_gr_support(chart, lam, window)
            for f in r.failures:
                f.update({"chart": tag, "lambda": str(lam)})
            v.merge(r)
        out["gr_support"] = v
    if "C1" in checks:
        r = localmodel.verify_C1_sequence(chart, window)
        for f in r.failures:
            f["chart"] = tag
        out["C1"] = r
    if "lemma" in checks and all(e == 1 for e in chart.e):
        v = localmodel.Verdict("lemma")
        for p in range(chart.n + 1):
            rep = localmodel.quotient_cohomology_lemma(chart, p, localmodel.window_l1(chart.n, min(radius, 4)))
            v.checked += 1
            if not rep.passed:
                v.fail({"chart": tag, "p": p, "report": rep.to_json()})
        out["lemma"] = v
    return out


def _local_worker(args):
    chart_json, params = args
    rep = local_chart_report(localmodel.ChartData.from_json(chart_json), params)
    return {k: v.to_json() for k, v in rep.items()}


def task_local_verify(params: dict, ctx: dict):
    charts = _local_charts(params)
    jobs = ctx.get("jobs", 1)
    work = [(c.to_json(), params) for c in charts]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            per_chart = list(ex.map(_local_worker, work))
    else:
        per_chart = [_local_worker(w) for w in work]
    merged: Dict[str, localmodel.Verdict] = {}
    for rep in per_chart:
        for k, d in rep.items():
            v = merged.setdefault(k, localmodel.Verdict(k))
            v.merge(localmodel.Verdict(d["name"], d["passed"], d["checked"], d["failures"]))
            if k == "gr_acyclic":
                fl = v.details.setdefault("failing_lambdas", {})
                for lam in d["details"].get("failing_lambdas", []):
                    fl[lam] = fl.get(lam, 0) + 1
    checks = [_verdict_check(k, merged[k]) for k in LOCAL_CHECKS if k in merged]
    return checks, {"charts": len(charts), "radius": int(params.get("radius", 6))}


def _stabilized(name: str, fn: Callable[[], object]):
    try:
        return fn(), None
    except p1global.StabilizationError as e:
        return None, Check(name, False, True, {"error": str(e), "certificate": e.certificate.to_json()})


def task_p1_hodge(params: dict, ctx: dict):
    checks, results = [], {}
    N = ctx.get("truncation")
    for prob in _problems(params):
        name = _pname(prob)
        results[name] = {}
        for k in params.get("k", [0, 1, 2]):
            rep, err = _stabilized("irregular_hodge", lambda: p1global.irregular_hodge(prob, int(k), N=N))
            if err:
                err.data["problem"] = name
                checks.append(err)
                continue
            results[name][str(k)] = rep.to_json()
            checks.append(Check("irregular_hodge", rep.passed, True, {"problem": name, "k": k,
                                                                         "jumps": [str(j) for j in rep.jumps],
                                                                         "witnesses": rep.witnesses}))
    return checks, results


def task_p1_degeneration(params: dict, ctx: dict):
    checks, results = [], {}
    N = ctx.get("truncation")
    for prob in _problems(params):
        name = _pname(prob)
        for alpha in _alphas(params, prob):
            tag = {"problem": name, "alpha": str(alpha)}
            for k in params.get("k", [0, 1, 2]):
                rep, err = _stabilized("decomposition", lambda: p1global.decomposition_check(prob, alpha, int(k), N))
                if err:
                    err.data.update(tag)
                    checks.append(err)
                    continue
                checks.append(Check("decomposition", rep.passed, True, dict(tag, **rep.to_json())))
            s = p1global.sigma_e1_check(prob, alpha, N)
            checks.append(Check("sigma_e1", s.passed, True, dict(tag, degrees=list(s.degrees),
                                                                  e1={str(k): v for k, v in s.entries.items()})))
        results[name] = {"alphas": [str(a) for a in _alphas(params, prob)]}
    return checks, results


def task_p1_uv(params: dict, ctx: dict):
    checks, results = [], {}
    N = ctx.get("truncation")
    samples = [tuple(_frac(x) for x in uv) for uv in params.get("samples", p1global.DEFAULT_UV)]
    for prob in _problems(params):
        name = _pname(prob)
        samp = [tuple(prob.field(x) if prob.field.name != "QQ" else x for x in uv) for uv in samples]
        for alpha in _alphas(params, prob):
            rep, err = _stabilized("uv_independence",
                                   lambda: p1global.verify_uv_independence(prob, alpha, samp, N))
            if err:
                err.data.update({"problem": name, "alpha": str(alpha)})
                checks.append(err)
                continue
            js = rep.to_json(prob.field)
            results.setdefault(name, {})[str(alpha)] = js
            checks.append(Check("uv_independence", rep.passed, True, {"problem": name, "alpha": str(alpha),
                                                                       "dims": [r["dims"] for r in js["table"]]}))
    return checks, results


def task_charp_cartier(params: dict, ctx: dict):
    atlas = charp.atlas_from_config(params)
    radius = int(params.get("radius", 6))
    checks = []
    seen = []
    for ch in atlas.charts:
        cd = ch.chart_data
        if cd in seen:
            continue
        seen.append(cd)
        window = localmodel.window_l1(cd.n, radius)
        for a in params.get("a", list(range(cd.n + 1))):
            a = int(a)
            if a < cd.n:
                v = charp.verify_closed_intersection(cd, a, window, atlas.p)
                checks.append(Check("closed_intersection", v.passed, True, dict(v.to_json(), chart=cd.to_json(), a=a)))
            v = charp.verify_cartier_iso_omega_f(cd, a, atlas.p, window)
            checks.append(Check("cartier_iso", v.passed, True, dict(v.to_json(), chart=cd.to_json(), a=a)))
    return checks, {"atlas": atlas.to_json()}


def task_charp_splitting(params: dict, ctx: dict):
    atlas = charp.atlas_from_config(params)
    perts = [charp.Perturbation.from_json(d) for d in params.get("perturbations", [])]
    checks = []
    try:
        lifts = charp.build_frob_lift(atlas, perts, strict=True)
        checks.append(Check("lift_conditions", True))
    except charp.LiftError as e:
        lifts = charp.build_frob_lift(atlas, perts, strict=False)
        checks.append(Check("lift_conditions", False, True, {"error": str(e), "residual": e.residual}))
    for lf in lifts:
        if lf.chart_info.meets_P:
            v = charp.verify_u_sum(lf)
            checks.append(Check("u_sum", v.passed, True, dict(v.to_json(), chart=lf.chart)))
    n = max(c.n for c in atlas.charts)
    i_max = int(params.get("i_max", min(n, atlas.p - 1)))
    rep = charp.assemble_splitting(atlas, lifts, i_max, int(params.get("radius", 2)))
    for key, v in sorted(rep.verdicts.items()):
        checks.append(Check("splitting_" + key, v.passed, True, v.to_json()))
    if atlas.kind == "P1":
        hz = [0] if params.get("horizontal") else []
        v = charp.charp_degeneration_dims(atlas.p, hz, ctx.get("truncation"))
        checks.append(Check("degeneration_dims", v.passed, bool(v.details.get("asserted")), v.to_json()))
    return checks, {"atlas": atlas.to_json(), "lifts": [lf.to_json() for lf in lifts], "phi_zero": rep.phi_zero,
                    "i_max": i_max}


@dataclass
class FuzzStats:
    count: int
    consistent: int
    degenerate: int
    counterexamples: List[dict]

    def to_json(self) -> dict:
        return {"count": self.count, "consistent": self.consistent, "degenerate": self.degenerate,
                "counterexamples": self.counterexamples}


def fuzz_filtered(seed: int, count: int, checker: Callable = filtcx.triple_equivalence,
                  max_total: int = 12, max_len: int = 4) -> FuzzStats:
    """Random filtered complexes over Q; every one must satisfy the three-way equivalence."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = random.Random(seed)
    ok = deg = 0
    bad = []
    for i in range(count):
        f = filtcx.random_filtered_complex(rng, max_total=max_total, max_len=max_len)
        r = checker(f)
        deg += bool(r.degenerate)
        if r.consistent:
            ok += 1
        else:
            bad.append({"index": i, "complex": filtcx.to_json(f),
                        "verdicts": {"degenerate": r.degenerate, "e1_total": r.e1_total, "h_total": r.h_total,
                                     "torsion_free": r.torsion_free}})
    return FuzzStats(count, ok, deg, bad)


def task_filtcx_fuzz(params: dict, ctx: dict):
    seed = int(params.get("seed", ctx.get("seed", 0)))
    st = fuzz_filtered(seed, int(params.get("count", 200)), max_total=int(params.get("max_total", 12)),
                       max_len=int(params.get("max_len", 4)))
    return [Check("triple_equivalence", st.consistent == st.count, True, st.to_json())], {"seed": seed}


def task_filtcx_check(params: dict, ctx: dict):
    if params.get("example") == "planted":
        f = filtcx.planted_nondegenerate()
    elif "complex" in params:
        f = filtcx.from_json(params["complex"])
    else:
        raise PlanError("filtcx-check needs 'complex' or example = 'planted'")
    rep = filtcx.e1_degenerates(f, all_witnesses=True)
    eq = filtcx.triple_equivalence(f)
    wit = [w.to_json(f.field) for w in rep.witnesses]
    e1 = filtcx.spectral_page(f, 1)
    return ([Check("e1_degenerates", rep.verdict, True, {"witnesses": wit}),
             Check("triple_equivalence", eq.consistent, True,
                   {"e1_total": eq.e1_total, "h_total": eq.h_total, "torsion_free": eq.torsion_free})],
            {"e1": filtcx.page_to_json(e1, f.field)})


HANDLERS = {
    "local-verify": task_local_verify,
    "p1-hodge": task_p1_hodge,
    "p1-degeneration": task_p1_degeneration,
    "p1-uv": task_p1_uv,
    "charp-cartier": task_charp_cartier,
    "charp-splitting": task_charp_splitting,
    "filtcx-fuzz": task_filtcx_fuzz,
    "filtcx-check": task_filtcx_check,
}


# ---------------------------------------------------------------------------
# Running and reporting
# ---------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


def run_task(index: int, task: TaskSpec, ctx: dict) -> dict:
    t0 = time.perf_counter()
    entry = {"index": index, "kind": task.kind, "params": task.params}
    try:
        checks, results = HANDLERS[task.kind](task.params, ctx)
        entry["checks"] = [c.to_json() for c in checks]
        entry["results"] = results
    except PlanError:
        raise
    except (ValueError, KeyError, TypeError) as e:
        raise PlanError("task %d (%s): %s" % (index, task.kind, e)) from e
    entry["passed"] = all(c["passed"] for c in entry["checks"] if c["asserted"])
    if ctx.get("timing"):
        entry["seconds"] = round(time.perf_counter() - t0, 3)
    return _jsonable(entry)


def _run_one(args):
    index, task, ctx = args
    return run_task(index, task, ctx)


def run(plan: RunPlan, jobs: int = 1, timing: bool = False) -> dict:
    """Execute every task; the report lists tasks in plan order."""
    ctx = {"seed": plan.seed, "truncation": plan.truncation, "timing": timing, "jobs": 1}
    work = [(i, t, ctx) for i, t in enumerate(plan.tasks)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            tasks = list(ex.map(_run_one, work))
    else:
        ctx["jobs"] = jobs
        tasks = [_run_one(w) for w in work]
    return {"seed": plan.seed, "truncation": plan.truncation, "tasks": tasks,
            "passed": all(t["passed"] for t in tasks)}


def _summary(check: dict) -> str:
    d = check["data"]
    tag = " ".join("%s=%s" % (k, d[k]) for k in ("problem", "alpha", "k", "a") if k in d)
    tag = tag + " " if tag else ""
    for key in ("dims", "jumps", "terms", "residual", "witnesses", "error"):
        if d.get(key):
            return tag + "%s=%s" % (key, json.dumps(d[key], sort_keys=True))
    if "checked" in d and not d.get("failures"):
        return tag + "checked=%s" % d["checked"]
    if d.get("failures"):
        return "failures=%d first=%s" % (len(d["failures"]), json.dumps(d["failures"][0], sort_keys=True))
    return tag.strip()


def render(report: dict, fmt: str = "json") -> str:
    """JSON is canonical; CSV and text list one row per check."""
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    rows = []
    for t in report["tasks"]:
        for c in t["checks"]:
            rows.append([t["index"], t["kind"], c["name"], "PASS" if c["passed"] else "FAIL",
                         "asserted" if c["asserted"] else "reported", _summary(c)])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["task", "kind", "check", "verdict", "mode", "summary"])
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "text":
        lines = ["%-3s %-16s %-22s %-4s %-8s %s" % tuple(r) for r in rows]
        lines.append("overall: %s" % ("PASS" if report["passed"] else "FAIL"))
        return "\n".join(lines) + "\n"
    raise ValueError("unknown format %r" % fmt)


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=FORMATS, help="report format (default json)")
    common.add_argument("--seed", type=int, help="override the plan seed")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--truncation", type=int, help="Cech window for P^1 tasks")
    common.add_argument("--timing", action="store_true", help="add wall-clock seconds per task")
    ap = argparse.ArgumentParser(prog="irrhodge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run a plan file")
    r.add_argument("--plan", required=True, help="JSON or TOML plan")
    for kind in TASK_KINDS:
        s = sub.add_parser(kind, parents=[common], help="run a single %s task" % kind)
        s.add_argument("--config", help="JSON or TOML file with task params")
        s.add_argument("--params", help="task params as a JSON string")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            plan = load_plan(args.plan)
        else:
            params = load_document(args.config) if args.config else {}
            if args.params:
                params.update(json.loads(args.params))
            plan = RunPlan([TaskSpec(args.command, params)])
        if args.seed is not None:
            plan.seed = args.seed
        if args.truncation is not None:
            plan.truncation = args.truncation
        report = run(plan, jobs=args.jobs, timing=args.timing)
    except (PlanError, OSError, json.JSONDecodeError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    fmt = args.format or plan.output.get("format", "json")
    text = render(report, fmt)
    out = args.out or plan.output.get("path")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
