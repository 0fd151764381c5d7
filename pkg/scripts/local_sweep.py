"""Full local-model sweep over monomial charts, with per-check timing."""
import argparse
import time

from irrhodge import cli, localmodel


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-dim", type=int, default=3)
    ap.add_argument("--max-e", type=int, default=3)
    ap.add_argument("--radius", type=int, default=6)
    args = ap.parse_args()
    charts = localmodel.chart_family(args.max_dim, args.max_e)
    print("%d charts, slices |a| <= %d" % (len(charts), args.radius))
    for name in cli.LOCAL_CHECKS:
        t = time.perf_counter()
        checks, _ = cli.task_local_verify({"max_dim": args.max_dim, "max_e": args.max_e,
                                           "radius": args.radius, "checks": [name]}, {})
        c = checks[0]
        extra = c.data.get("details", {}).get("failing_lambdas", "")
        print("%-10s %s checked=%-7d %6.1fs %s" % (name, "PASS" if c.passed else "FAIL",
                                                  c.data["checked"], time.perf_counter() - t, extra))


if __name__ == "__main__":
    main()
