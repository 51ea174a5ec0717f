"""Shrink a campaign instance while its verdict label stays the same.

Example: python3 scripts/shrink_counterexample.py 'random:seed=11,m=4,n=1,mag=5,density=1.0,den=1'
"""

import argparse

from eqpivot.generators import regenerate
from eqpivot.harness import differential_run, shrink
from eqpivot.model import emit_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("instance_id")
    args = ap.parse_args()

    lp = regenerate(args.instance_id)
    label = differential_run(lp).label
    small = shrink(lp, lambda r: r.label == label)
    rec = differential_run(small)
    print(f"# verdict {label}: {lp.m}x{lp.n} shrunk to {small.m}x{small.n}")
    print(f"# engine {rec.engine_label}, oracle {rec.oracle_status}")
    print(emit_instance(small), end="")


if __name__ == "__main__":
    main()
