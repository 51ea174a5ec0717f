"""Shared builders and hypothesis strategies for the test suite."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

from hypothesis import strategies as st

from eqpivot.model import CanonicalLp, Constraint, GeneralLp
from eqpivot.tableau import EqTableau, PrSystem

FIXTURES = Path(__file__).parent / "fixtures"
F = Fraction


def load_mq4() -> EqTableau:
    return EqTableau.from_json(json.loads((FIXTURES / "mq4.json").read_text()))


def load_printed_mq1() -> list[list[Fraction]]:
    data = json.loads((FIXTURES / "mq1_printed.json").read_text())
    return [[F(v) for v in row] for row in data["rows"]]


WORKED_Z = tuple(F(v) for v in (1, 1, 2, 3, 0, 0, 0, 0))

small_int = st.integers(-5, 5)
small_frac = st.builds(F, st.integers(-9, 9), st.integers(1, 4))


@st.composite
def canonical_lps(draw, max_m=4, max_n=4, entries=small_int):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    A = [[draw(entries) for _ in range(n)] for _ in range(m)]
    b = [draw(entries) for _ in range(m)]
    c = [draw(entries) for _ in range(n)]
    return CanonicalLp(A, b, c)


@st.composite
def general_lps(draw, max_m=4, max_n=4):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, max_m))
    sense = draw(st.sampled_from(["max", "min"]))
    c = [draw(small_frac) for _ in range(n)]
    cons = [
        Constraint([draw(small_frac) for _ in range(n)], draw(st.sampled_from(["<=", "=", ">="])), draw(small_frac))
        for _ in range(m)
    ]
    free = draw(st.frozensets(st.integers(0, n - 1)))
    return GeneralLp(sense, c, cons, free)


def random_pr_system(rng: random.Random, max_pairs: int = 6):
    """A P z = r system of the reduced shape with a nonnegative solution z.

    P has two leading columns with positive gap-row entries followed by an
    identity block over the equality rows; r is built as P z.
    """
    N = rng.randint(1, max_pairs)

    def q():
        return F(rng.randint(-9, 9), rng.randint(1, 4))

    lead = [[q(), q()] for _ in range(N)] + [[F(rng.randint(1, 9), rng.randint(1, 3)), F(rng.randint(1, 9), rng.randint(1, 3))]]
    P = []
    for i in range(N + 1):
        unit = [F(1) if k == i else F(0) for k in range(N)]
        P.append(tuple(lead[i] + unit))
    t1 = F(rng.randint(0, 6), rng.randint(1, 3))
    t2 = F(rng.randint(0, 6), rng.randint(1, 3))
    if t1 + t2 == 0:
        t1 = F(1)
    xs = [F(rng.randint(0, 20), rng.randint(1, 3)) for _ in range(N)]
    z = (t1, t2, *xs)
    r = tuple(sum((a * v for a, v in zip(row, z)), F(0)) for row in P)
    return PrSystem(tuple(P), r, tuple(range(N + 2)), ()), z


def random_witness_triple(rng: random.Random, max_pairs: int = 5):
    """(tableau, z_star, negative rows) with zero gap-row right-hand side.

    Unit columns sit at N..2N-1; z_star is nonnegative with positive weight on
    the unit columns of the negative rows.
    """
    N = rng.randint(1, max_pairs)
    m = rng.randint(0, N)
    n = N - m
    width = 2 * N
    units = list(range(N, 2 * N))
    free_cols = list(range(N))

    def q():
        return F(rng.randint(-9, 9), rng.randint(1, 3))

    z = [F(0)] * width
    for j in free_cols:
        z[j] = F(rng.randint(0, 6), rng.randint(1, 3))
    anchor = rng.choice(free_cols)
    z[anchor] = F(rng.randint(1, 6))
    neg_rows = sorted(rng.sample(range(N), rng.randint(1, N)))
    for i, j in enumerate(units):
        z[j] = F(rng.randint(1 if i in neg_rows else 0, 9), rng.randint(1, 3))

    rows = []
    for i in range(N):
        row = [F(0)] * width
        for j in free_cols:
            row[j] = q()
        row[units[i]] = F(1)
        if i in neg_rows:
            target = -F(rng.randint(1, 9), rng.randint(1, 3))
            rest = sum((row[j] * z[j] for j in range(width) if j != anchor), F(0))
            row[anchor] = (target - rest) / z[anchor]
        rhs = sum((a * v for a, v in zip(row, z)), F(0))
        rows.append(tuple(row + [rhs]))
    gap = [F(0)] * width
    for j in free_cols:
        gap[j] = q()
    rest = sum((gap[j] * z[j] for j in free_cols if j != anchor), F(0))
    gap[anchor] = -rest / z[anchor]
    rows.append(tuple(gap + [F(0)]))
    t = EqTableau(m, n, tuple(rows), tuple(units))
    return t, tuple(z), neg_rows


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []
