"""Two-phase dense-tableau primal simplex over exact rationals.

This is the referee for the pivot engine, so it is deliberately plain: Bland's
rule throughout, no factorizations, and every result carries a certificate that
:func:`verify_certificate` re-checks from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import CanonicalLp

ZERO = Fraction(0)

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"


class PivotLimitExceeded(RuntimeError):
    def __init__(self, pivots: int, bases: list[tuple[int, ...]]):
        super().__init__(f"no termination within {pivots} pivots")
        self.pivots = pivots
        self.bases = bases

    @property
    def repeated_basis(self) -> bool:
        return len(set(self.bases)) < len(self.bases)


@dataclass(frozen=True)
class OracleResult:
    status: str
    x: Optional[tuple[Fraction, ...]] = None
    y: Optional[tuple[Fraction, ...]] = None
    objective: Optional[Fraction] = None
    farkas: Optional[tuple[Fraction, ...]] = None
    ray: Optional[tuple[Fraction, ...]] = None
    pivots: int = 0


class _Tableau:
    """Rows ``B^-1 [A | I | art | b]`` plus a reduced-cost row (max convention)."""

    def __init__(self, lp: CanonicalLp):
        m, n = lp.m, lp.n
        self.m, self.n = m, n
        self.flipped = [lp.b[i] < 0 for i in range(m)]
        self.art = [i for i in range(m) if self.flipped[i]]
        self.width = n + m + len(self.art)
        rows = []
        basis = []
        for i in range(m):
            sign = -1 if self.flipped[i] else 1
            row = [sign * a for a in lp.A[i]] + [ZERO] * (m + len(self.art)) + [sign * lp.b[i]]
            row[n + i] = Fraction(sign)
            if self.flipped[i]:
                k = self.art.index(i)
                row[n + m + k] = Fraction(1)
                basis.append(n + m + k)
            else:
                basis.append(n + i)
            rows.append(row)
        self.rows = rows
        self.basis = basis
        self.pivots = 0
        self.history: list[tuple[int, ...]] = [tuple(basis)]

    def is_artificial(self, j: int) -> bool:
        return j >= self.n + self.m

    def set_objective(self, costs: list[Fraction]) -> None:
        obj = list(costs) + [ZERO]
        for i, b in enumerate(self.basis):
            cb = costs[b]
            if cb:
                obj = [o - cb * v for o, v in zip(obj, self.rows[i])]
        self.obj = obj

    def pivot(self, r: int, c: int) -> None:
        pv = self.rows[r][c]
        prow = [v / pv for v in self.rows[r]]
        self.rows[r] = prow
        for i, row in enumerate(self.rows):
            if i != r and row[c] != 0:
                f = row[c]
                self.rows[i] = [a - f * p for a, p in zip(row, prow)]
        if self.obj[c] != 0:
            f = self.obj[c]
            self.obj = [a - f * p for a, p in zip(self.obj, prow)]
        self.basis[r] = c
        self.pivots += 1
        self.history.append(tuple(self.basis))

    def entering(self, rule: str, allowed) -> Optional[int]:
        cands = [j for j in range(self.width) if allowed(j) and self.obj[j] > 0]
        if not cands:
            return None
        if rule == "bland":
            return cands[0]
        best = max(self.obj[j] for j in cands)
        return next(j for j in cands if self.obj[j] == best)

    def leaving(self, c: int, rule: str) -> Optional[int]:
        best = None
        for i, row in enumerate(self.rows):
            if row[c] > 0:
                ratio = row[-1] / row[c]
                if best is None or ratio < best[0]:
                    best = (ratio, [i])
                elif ratio == best[0]:
                    best[1].append(i)
        if best is None:
            return None
        ties = best[1]
        if rule == "bland":
            return min(ties, key=lambda i: self.basis[i])
        return ties[0]

    def run(self, rule: str, allowed, max_pivots: Optional[int]) -> Optional[int]:
        """Iterate to optimality; return an unbounded entering column or None."""
        while True:
            c = self.entering(rule, allowed)
            if c is None:
                return None
            r = self.leaving(c, rule)
            if r is None:
                return c
            if max_pivots is not None and self.pivots >= max_pivots:
                raise PivotLimitExceeded(self.pivots, self.history)
            self.pivot(r, c)

    def x(self) -> list[Fraction]:
        x = [ZERO] * self.n
        for i, b in enumerate(self.basis):
            if b < self.n:
                x[b] = self.rows[i][-1]
        return x


def simplex_solve(lp: CanonicalLp, rule: str = "bland", max_pivots: Optional[int] = None) -> OracleResult:
    """Solve max c.x, Ax <= b, x >= 0.

    ``rule="dantzig"`` picks the largest reduced cost with no anti-cycling
    safeguard; it exists to demonstrate cycling and is never used as referee.
    """
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    tab = _Tableau(lp)
    m, n = lp.m, lp.n

    if tab.art:
        costs = [ZERO] * (n + m) + [Fraction(-1)] * len(tab.art)
        tab.set_objective(costs)
        tab.run(rule, lambda j: True, max_pivots)
        if tab.obj[-1] != 0:
            # obj[-1] holds minus the phase-1 optimum; duals come from the
            # initial basis columns: pi_i = cost - reduced cost
            u = []
            for i in range(m):
                if tab.flipped[i]:
                    k = tab.art.index(i)
                    pi = Fraction(-1) - tab.obj[n + m + k]
                    u.append(-pi)
                else:
                    u.append(-tab.obj[n + i])
            return OracleResult(INFEASIBLE, farkas=tuple(u), pivots=tab.pivots)
        for i in range(m):
            if tab.is_artificial(tab.basis[i]):
                c = next((j for j in range(n + m) if tab.rows[i][j] != 0), None)
                if c is not None:
                    tab.pivot(i, c)

    costs = list(lp.c) + [ZERO] * (m + len(tab.art))
    tab.set_objective(costs)
    ray_col = tab.run(rule, lambda j: not tab.is_artificial(j), max_pivots)
    x = tab.x()
    if ray_col is not None:
        ray = [ZERO] * n
        if ray_col < n:
            ray[ray_col] = Fraction(1)
        for i, b in enumerate(tab.basis):
            if b < n:
                ray[b] = -tab.rows[i][ray_col]
        return OracleResult(UNBOUNDED, x=tuple(x), ray=tuple(ray), pivots=tab.pivots)
    y = tuple(-tab.obj[n + i] for i in range(m))
    return OracleResult(OPTIMAL, x=tuple(x), y=y, objective=lp.objective(x), pivots=tab.pivots)


def _dot(a, b) -> Fraction:
    return sum((u * v for u, v in zip(a, b)), ZERO)


def verify_certificate(lp: CanonicalLp, res: OracleResult) -> bool:
    m, n = lp.m, lp.n
    cols = [[lp.A[i][j] for i in range(m)] for j in range(n)]

    def primal_feasible(x):
        return (
            x is not None
            and len(x) == n
            and all(v >= 0 for v in x)
            and all(_dot(row, x) <= bi for row, bi in zip(lp.A, lp.b))
        )

    if res.status == OPTIMAL:
        x, y = res.x, res.y
        if not primal_feasible(x) or y is None or len(y) != m:
            return False
        if any(v < 0 for v in y) or any(_dot(col, y) < cj for col, cj in zip(cols, lp.c)):
            return False
        obj = lp.objective(x)
        return obj == _dot(lp.b, y) and res.objective == obj
    if res.status == INFEASIBLE:
        u = res.farkas
        if u is None or len(u) != m or any(v < 0 for v in u):
            return False
        return all(_dot(col, u) >= 0 for col in cols) and _dot(lp.b, u) < 0
    if res.status == UNBOUNDED:
        x, d = res.x, res.ray
        if not primal_feasible(x) or d is None or len(d) != n or any(v < 0 for v in d):
            return False
        return all(_dot(row, d) <= 0 for row in lp.A) and _dot(lp.c, d) > 0
    return False


def cycles_without_anticycling(lp: CanonicalLp, budget: int = 100) -> bool:
    """True when the largest-coefficient rule fails to finish within ``budget`` pivots."""
    try:
        simplex_solve(lp, rule="dantzig", max_pivots=budget)
    except PivotLimitExceeded:
        return True
    return False
