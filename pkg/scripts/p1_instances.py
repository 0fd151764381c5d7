"""Irregular Hodge numbers, (u, v) tables and decompositions for the standard P^1 instances."""
import argparse

from irrhodge import p1global


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--truncation", type=int, default=None, help="Cech truncation window N")
    args = ap.parse_args()
    for prob in p1global.standard_instances():
        rep = p1global.irregular_hodge(prob, 1, N=args.truncation)
        print("%-12s dim H^1 = %d  jumps = %s  stable windows %s" % (
            prob.name, rep.dim_H, [str(j) for j in rep.jumps], rep.certificate.windows))
        for alpha in p1global.alpha_grid(prob):
            uv = p1global.verify_uv_independence(prob, alpha, N=args.truncation)
            dec = p1global.decomposition_check(prob, alpha, 1, args.truncation)
            print("    alpha=%-4s uv dims %s  oracle %s  h-terms %s  bundle degrees %s" % (
                alpha, sorted({d for _, d in uv.table}), uv.oracle, dec.terms, dec.degrees))


if __name__ == "__main__":
    main()
