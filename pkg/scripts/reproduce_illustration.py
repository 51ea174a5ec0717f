"""Run the pivot engine on the two-variable worked instance and print every tableau.

Checks the tableau after the second MinorP instance against the printed one
kept in tests/fixtures/mq4.json, then folds the known optimum into P z = r.
"""

import json
from pathlib import Path

from eqpivot import engine as eng
from eqpivot.generators import worked_instance
from eqpivot.model import canonicalize, format_rational
from eqpivot.tableau import EqTableau, reduce_to_pr

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "mq4.json"


def show(t: EqTableau) -> str:
    cells = [[format_rational(v) for v in row] for row in t.rows]
    w = max(len(c) for row in cells for c in row)
    return "\n".join("  " + " ".join(c.rjust(w) for c in row) for row in cells)


def main():
    lp = canonicalize(worked_instance())
    res = eng.run(lp)
    print("initial tableau (theta = 1):")
    print(show(res.trace.initial))
    for step in res.trace.steps:
        where = f" at ({step.row}, {step.col})" if step.op == "pivot" else ""
        print(f"\nstep {step.index}: {step.op} [{step.phase}]{where}  {step.rationale}")
        print(show(step.snapshot))
    vec = ", ".join
    print(
        f"\n{res.status}: objective {format_rational(res.objective)}, "
        f"x = ({vec(map(format_rational, res.x))}), y = ({vec(map(format_rational, res.y))})"
    )
    print(f"majorCount {res.major_count}, minorCount {res.minor_count}, m + n = {res.size}")

    printed = EqTableau.from_json(json.loads(FIXTURE.read_text()))
    match = res.trace.steps[3].snapshot.rows == printed.rows
    print(f"\nstep 3 equals the printed fourth tableau: {match}")

    pr = reduce_to_pr(printed, res.z, (7, 1))
    print("P = [" + "|".join(f"C{j + 1}" for j in pr.columns) + "]")
    for row in pr.P:
        print("  " + " ".join(format_rational(v).rjust(3) for v in row))
    print("r = (" + ", ".join(format_rational(v) for v in pr.r) + ")")


if __name__ == "__main__":
    main()
