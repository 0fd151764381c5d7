"""Characteristic p: Cartier checks and Deligne-Illusie style splittings from Frobenius lifts."""
import argparse

from irrhodge import charp
from irrhodge.localmodel import window_l1


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5])
    args = ap.parse_args()
    for p in args.primes:
        at = charp.affine_atlas(p, 2, 2, 2)
        cd = at.charts[0].chart_data
        for a in range(3):
            v = charp.verify_cartier_iso_omega_f(cd, a, p, window_l1(2, 6))
            print("p=%d cartier a=%d %s checked=%d" % (p, a, v.passed, v.checked))
        at = charp.affine_atlas(p, 2, 2, 2, copies=2)
        lifts = charp.build_frob_lift(at, [
            charp.Perturbation(1, 0, (((1, 0), 1),), "multiplicative"),
            charp.Perturbation(1, 1, (((1, 0), -1),), "multiplicative"),
        ])
        rep = charp.assemble_splitting(at, lifts, 2)
        print("p=%d perturbed splitting: %s phi_zero=%s" % (
            p, {k: v.passed for k, v in sorted(rep.verdicts.items())}, rep.phi_zero))
        dd = charp.charp_degeneration_dims(p, [0])
        print("p=%d P1 degeneration dims d=%s zero=%s" % (p, dd.details["dims_d"], dd.details["dims_zero"]))


if __name__ == "__main__":
    main()
