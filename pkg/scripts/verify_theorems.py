"""Run the pairing checks on the triangle and on the randomized suite; print a summary per case."""

import argparse
from pathlib import Path

import numpy as np

from qwalk import experiments as ex
from qwalk.errors import PhaseDegeneracy

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--suite", type=Path, default=ROOT / "fixtures" / "random_suite.json")
    ap.add_argument("--refine", type=int, default=3)
    args = ap.parse_args()

    tri = ex.verify_pairing_theorems(ex.triangle_spec(), 2 * np.pi)
    print(f"triangle passed={tri.passed} c_fit={tri.to_dict().get('c_fit')}")

    bad = paired = total = 0
    for k, (spec, phases) in enumerate(ex.load_suite(args.suite)):
        for phi in phases:
            try:
                rep = ex.verify_with_refinement(spec, phi, max_refinements=args.refine)
            except PhaseDegeneracy:
                print(f"case {k} phi={phi:.6f}: degenerate, skipped")
                continue
            total += 1
            paired += rep.pairing_found
            ok = rep.checks()["pairing_iff"]
            bad += not ok
            print(f"case {k} phi={phi:.6f}: paired={rep.pairing_found} iff={ok} passed={rep.passed}")
    print(f"{total} cases, {paired} paired, {bad} counterexamples")


if __name__ == "__main__":
    main()
