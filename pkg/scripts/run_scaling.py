"""Fit m_star = a sqrt(N) for the triangle and say which closed form a agrees with."""

import argparse
import json
from pathlib import Path

import numpy as np

from qwalk import experiments as ex


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", default="64,128,256,512,1024")
    ap.add_argument("--branch", default="+")
    ap.add_argument("--out", type=Path, default=None, help="CSV path")
    args = ap.parse_args()

    n_list = [int(x) for x in args.n.split(",")]
    report = ex.scan_scaling(ex.triangle_spec(), 2 * np.pi, args.branch, n_list)
    print(report.to_csv(), end="")
    closest = report.closest({"7pi/8": ex.QUOTED_TRIANGLE_A, "pi*sqrt(7)/4": ex.FORMULA_TRIANGLE_A})
    print(json.dumps({"a": report.a, "a_predicted": report.a_predicted,
                      "r_squared": report.r_squared, "closest": closest}))
    if args.out:
        args.out.write_text(report.to_csv())


if __name__ == "__main__":
    main()
