"""Differential campaign: pivot engine versus the simplex referee on random LPs.

Writes records.csv, summary.json, runtime.json and counterexamples/ under --out.
"""

import argparse
import json
from pathlib import Path

from eqpivot.engine import EngineConfig
from eqpivot.generators import GeneratorSpec
from eqpivot.harness import fuzz
from eqpivot.model import parse_rational


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-m", type=int, default=8)
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--kind", choices=("random", "degenerate"), default="random")
    ap.add_argument("--max-den", type=int, default=1)
    ap.add_argument("--theta", default="1")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("campaign-out"))
    args = ap.parse_args()

    spec = GeneratorSpec(args.kind, max_m=args.max_m, max_n=args.max_n, max_den=args.max_den)
    cfg = EngineConfig(theta=parse_rational(args.theta))
    report = fuzz([spec], args.count, args.seed, cfg, args.out, args.workers)
    summary = report.summary()
    summary.pop("counterexamples")
    summary.pop("inconclusive")
    print(json.dumps(summary, indent=2, sort_keys=True))
    print(f"{len(report.counterexamples)} evidence records under {args.out / 'counterexamples'}")
    print(f"runtime {report.runtime_seconds:.1f}s")
    raise SystemExit(report.exit_code)


if __name__ == "__main__":
    main()
