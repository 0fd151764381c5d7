"""Seeded fuzzing of the E1-degeneration equivalence on random filtered complexes."""
import argparse
import json

from irrhodge.cli import fuzz_filtered


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=200)
    args = ap.parse_args()
    st = fuzz_filtered(args.seed, args.count)
    print(json.dumps({k: v for k, v in st.to_json().items() if k != "counterexamples"}))
    for ce in st.counterexamples[:3]:
        print(json.dumps(ce))


if __name__ == "__main__":
    main()
