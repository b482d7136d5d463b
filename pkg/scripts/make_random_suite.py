"""Regenerate fixtures/random_suite.json: seeded small graphs, three leaf phases each."""

import argparse
from pathlib import Path

from qwalk import experiments as ex

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--count", type=int, default=24)
    ap.add_argument("--out", type=Path, default=ROOT / "fixtures" / "random_suite.json")
    args = ap.parse_args()
    ex.write_suite(ex.random_suite(args.seed, args.count), args.out, args.seed)
    print(f"wrote {args.count} graphs to {args.out}")


if __name__ == "__main__":
    main()
