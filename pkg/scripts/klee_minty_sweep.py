"""Engine counters on the Klee-Minty family, d = 1..D, next to simplex pivot counts
under Bland's rule and the largest-coefficient rule."""

import argparse
from pathlib import Path

from eqpivot.generators import GeneratorSpec, klee_minty
from eqpivot.harness import fuzz, klee_minty_table
from eqpivot.model import canonicalize
from eqpivot.oracle import simplex_solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=8)
    ap.add_argument("--base", type=int, default=5)
    ap.add_argument("--factor", type=int, default=2, help="4 gives the classic worst-case coupling")
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    specs = [GeneratorSpec("klee-minty", d=d, base=args.base, factor=args.factor) for d in range(1, args.d + 1)]
    report = fuzz(specs, len(specs), 0, out_dir=args.out)
    print(f"{'d':>2} {'m+n':>4} {'major':>6} {'minor':>6} {'bland':>6} {'largest':>8} {'optimum':>12}  verdict")
    for row in klee_minty_table(report):
        lp = canonicalize(klee_minty(row["d"], args.base, args.factor))
        bland = simplex_solve(lp).pivots
        largest = simplex_solve(lp, rule="dantzig").pivots
        print(
            f"{row['d']:>2} {row['mPlusN']:>4} {row['majorCount']:>6} {row['minorCount']:>6} "
            f"{bland:>6} {largest:>8} {row['oracleObjective']:>12}  {row['verdict']}"
        )


if __name__ == "__main__":
    main()
