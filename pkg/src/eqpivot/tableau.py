"""The combined primal-dual system Mz = q as an exact augmented tableau.

Variable order is ``z = (y_1..y_m, x_1..x_n, s_1..s_m, t_1..t_n)`` and, with
``N = m + n``, column ``j`` is paired with its complement ``j + N`` (mod 2N).
Rows ``0..N-1`` are the equality rows, row ``N`` is the duality-gap row, and
the last entry of every row is the right-hand side ``q``. All indices are
0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .model import CanonicalLp, format_rational, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)

Row = tuple[Fraction, ...]


class PivotError(ValueError):
    pass


class HypothesisViolation(ValueError):
    """Raised when a construction is called outside its stated preconditions."""


@dataclass(frozen=True)
class EqTableau:
    m: int
    n: int
    rows: tuple[Row, ...]
    basis: tuple[Optional[int], ...]
    lp: Optional[CanonicalLp] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        N = self.m + self.n
        if len(self.rows) != N + 1:
            raise ValueError(f"expected {N + 1} rows, got {len(self.rows)}")
        if any(len(r) != 2 * N + 1 for r in self.rows):
            raise ValueError(f"every row needs {2 * N + 1} entries")
        if len(self.basis) != N:
            raise ValueError(f"basis must have {N} entries")
        seen = {j for j in self.basis if j is not None}
        if any(complement(j, N) in seen for j in seen):
            raise ValueError("basis contains a complementary pair")

    @property
    def size(self) -> int:
        """m + n, the number of complementary pairs."""
        return self.m + self.n

    @property
    def ncols(self) -> int:
        return 2 * self.size

    @property
    def q(self) -> Row:
        return tuple(r[-1] for r in self.rows)

    @property
    def bottom(self) -> Row:
        return self.rows[-1][:-1]

    def entry(self, i: int, j: int) -> Fraction:
        return self.rows[i][j]

    def column(self, j: int) -> Row:
        return tuple(r[j] for r in self.rows)

    def replace(self, rows=None, basis=None) -> "EqTableau":
        return EqTableau(
            self.m,
            self.n,
            tuple(tuple(r) for r in rows) if rows is not None else self.rows,
            tuple(basis) if basis is not None else self.basis,
            self.lp,
        )

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "rows": [[format_rational(v) for v in r] for r in self.rows],
            "basis": list(self.basis),
            "pairing": [complement(j, self.size) for j in range(self.ncols)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EqTableau":
        m, n = int(data["m"]), int(data["n"])
        rows = tuple(tuple(parse_rational(str(v)) for v in r) for r in data["rows"])
        basis = data.get("basis")
        if basis is None:
            basis = [None] * (m + n)
        t = cls(m, n, rows, tuple(basis))
        pairing = data.get("pairing")
        if pairing is not None and list(pairing) != [complement(j, m + n) for j in range(2 * (m + n))]:
            raise ValueError("pairing does not match the j <-> j + (m+n) convention")
        return t

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def complement(j: int, size: int) -> int:
    """Index of the column paired with ``j`` when there are ``size`` pairs."""
    if not 0 <= j < 2 * size:
        raise IndexError(f"column {j} out of range for {size} pairs")
    return j + size if j < size else j - size


def build_eq(lp: CanonicalLp, theta=0) -> EqTableau:
    """Assemble [M | q] for ``lp`` and add ``theta`` times the gap row to every other row.

    ``theta`` may be a single rational or a sequence of ``m + n`` per-row multipliers.
    """
    m, n = lp.m, lp.n
    N = m + n
    if isinstance(theta, (int, Fraction)):
        thetas = [Fraction(theta)] * N
    else:
        thetas = [Fraction(v) for v in theta]
        if len(thetas) != N:
            raise ValueError(f"need {N} per-row theta values")
    if any(v < 0 for v in thetas):
        raise ValueError("theta must be nonnegative")

    width = 2 * N + 1
    rows = [[ZERO] * width for _ in range(N + 1)]
    for i in range(m):
        for j in range(n):
            rows[i][m + j] = lp.A[i][j]
        rows[i][N + i] = ONE
        rows[i][-1] = lp.b[i]
    for j in range(n):
        r = rows[m + j]
        for i in range(m):
            r[i] = -lp.A[i][j]
        r[N + m + j] = ONE
        r[-1] = -lp.c[j]
    gap = rows[N]
    for i in range(m):
        gap[i] = lp.b[i]
    for j in range(n):
        gap[m + j] = -lp.c[j]
    for i in range(N):
        if thetas[i]:
            rows[i] = [a + thetas[i] * g for a, g in zip(rows[i], gap)]
    basis = tuple(N + i for i in range(N))
    return EqTableau(m, n, tuple(tuple(r) for r in rows), basis, lp)


def gj_pivot(t: EqTableau, row: int, col: int) -> EqTableau:
    """Gauss-Jordan pivot making column ``col`` the unit vector with its 1 in ``row``."""
    piv = t.rows[row][col]
    if piv == 0:
        raise PivotError(f"zero pivot at ({row}, {col})")
    prow = tuple(v / piv for v in t.rows[row])
    rows = []
    for i, r in enumerate(t.rows):
        if i == row:
            rows.append(prow)
            continue
        f = r[col]
        rows.append(r if f == 0 else tuple(a - f * p for a, p in zip(r, prow)))
    basis = [None if b == col else b for b in t.basis]
    if row < t.size:
        basis[row] = col
        partner = complement(col, t.size)
        if partner in basis:
            raise PivotError(f"column {col} would enter beside its complement {partner}")
    return t.replace(rows=rows, basis=basis)


def basic_solution(t: EqTableau) -> Optional[tuple[Fraction, ...]]:
    """Read z off the basis map, or None when some equality row has no basic column."""
    if any(b is None for b in t.basis):
        return None
    z = [ZERO] * t.ncols
    for i, b in enumerate(t.basis):
        z[b] = t.rows[i][-1]
    return tuple(z)


def residuals(t: EqTableau, z: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Row-wise ``M z - q``."""
    return tuple(sum((a * v for a, v in zip(r[:-1], z)), ZERO) - r[-1] for r in t.rows)


def split_solution(m: int, n: int, z: Sequence[Fraction]):
    """Split z into (y, x, s, t)."""
    N = m + n
    return tuple(z[:m]), tuple(z[m:N]), tuple(z[N:N + m]), tuple(z[N + m:])


@dataclass
class CheckReport:
    residuals: tuple[Fraction, ...]
    equations: bool
    nonnegative: bool
    complementary: bool
    complementarity_violations: list[int]
    primal_feasible: Optional[bool] = None
    dual_feasible: Optional[bool] = None
    zero_gap: Optional[bool] = None
    primal_objective: Optional[Fraction] = None
    dual_objective: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        core = self.equations and self.nonnegative and self.complementary
        lp_checks = (self.primal_feasible, self.dual_feasible, self.zero_gap)
        return core and all(v is not False for v in lp_checks)


def verify_eq_solution(t0: EqTableau, z: Sequence[Fraction]) -> CheckReport:
    """Check z against the system of ``t0`` and, when ``t0`` knows its LP, LP optimality."""
    N = t0.size
    if len(z) != 2 * N:
        raise ValueError(f"z has length {len(z)}, expected {2 * N}")
    z = tuple(Fraction(v) for v in z)
    res = residuals(t0, z)
    viol = [j for j in range(N) if z[j] * z[j + N] != 0]
    report = CheckReport(
        residuals=res,
        equations=all(r == 0 for r in res),
        nonnegative=all(v >= 0 for v in z),
        complementary=not viol,
        complementarity_violations=viol,
    )
    lp = t0.lp
    if lp is not None:
        y, x, _, _ = split_solution(lp.m, lp.n, z)
        Ax = [sum((a * v for a, v in zip(row, x)), ZERO) for row in lp.A]
        ATy = [sum((lp.A[i][j] * y[i] for i in range(lp.m)), ZERO) for j in range(lp.n)]
        report.primal_feasible = all(v >= 0 for v in x) and all(a <= b for a, b in zip(Ax, lp.b))
        report.dual_feasible = all(v >= 0 for v in y) and all(a >= c for a, c in zip(ATy, lp.c))
        report.primal_objective = lp.objective(x)
        report.dual_objective = sum((bi * yi for bi, yi in zip(lp.b, y)), ZERO)
        report.zero_gap = report.primal_objective == report.dual_objective
    return report


@dataclass(frozen=True)
class PrSystem:
    P: tuple[Row, ...]
    r: Row
    # tableau columns that became P's columns, in order
    columns: tuple[int, ...]
    # tableau columns folded into r with their solution weights
    moved: tuple[tuple[int, Fraction], ...]

    @property
    def size(self) -> int:
        return len(self.r) - 1


def unit_columns(t: EqTableau, exclude=()) -> list[int]:
    """The column carrying the unit vector of each equality row, in row order."""
    out = []
    for i in range(t.size):
        b = t.basis[i]
        if b is None or b in exclude:
            b = next(
                (
                    j
                    for j in range(t.ncols)
                    if j not in exclude
                    and all(t.rows[k][j] == (ONE if k == i else ZERO) for k in range(t.size + 1))
                ),
                None,
            )
        if b is None:
            raise HypothesisViolation(f"row {i} has no unit column")
        out.append(b)
    return out


def reduce_to_pr(t: EqTableau, z: Sequence[Fraction], pair: tuple[int, int]) -> PrSystem:
    """Fold every column except ``pair`` and the unit columns into the right-hand side."""
    a, b = pair
    N = t.size
    z = tuple(Fraction(v) for v in z)
    if len(z) != 2 * N:
        raise ValueError(f"z has length {len(z)}, expected {2 * N}")
    if t.rows[N][a] <= 0 or t.rows[N][b] <= 0:
        raise HypothesisViolation("both designated columns need a positive gap-row entry")
    if z[a] + z[b] <= 0:
        raise HypothesisViolation("designated columns carry no weight in z")
    if any(residuals(t, z)):
        raise HypothesisViolation("z does not solve the tableau's equations")
    units = unit_columns(t, exclude=(a, b))
    keep = [a, b] + units
    moved = tuple((j, z[j]) for j in range(2 * N) if j not in keep)
    r = []
    for row in t.rows:
        r.append(row[-1] - sum((w * row[j] for j, w in moved), ZERO))
    P = tuple(tuple(row[j] for j in keep) for row in t.rows)
    if r[-1] <= 0:
        raise HypothesisViolation("gap-row right-hand side is not positive")
    return PrSystem(P, tuple(r), tuple(keep), moved)


@dataclass(frozen=True)
class ShiftResult:
    z: tuple[Fraction, ...]
    ratio: Fraction
    negative: tuple[int, ...]  # positions in z that came out negative

    @property
    def nonnegative(self) -> bool:
        return not self.negative


def _matvec(P, z):
    return tuple(sum((a * v for a, v in zip(row, z)), ZERO) for row in P)


def shifted_solution(pr: PrSystem, z: Sequence[Fraction]) -> ShiftResult:
    """Move the weight of P's first column onto its second, keeping P z = r exactly.

    ``z = (t1, t2, x_1..x_N)``. The unit-column parts absorb the difference,
    and any of them that turn negative are listed rather than hidden.
    """
    z = tuple(Fraction(v) for v in z)
    N = pr.size
    if len(z) != N + 2:
        raise ValueError(f"z has length {len(z)}, expected {N + 2}")
    g1, g2 = pr.P[N][0], pr.P[N][1]
    if g1 <= 0 or g2 <= 0 or pr.r[N] <= 0:
        raise HypothesisViolation("need positive gap-row entries and right-hand side")
    if any(v < 0 for v in z) or _matvec(pr.P, z) != pr.r:
        raise HypothesisViolation("z is not a nonnegative solution of P z = r")
    t1, t2 = z[0], z[1]
    f = g1 / g2
    xs = [t1 * (pr.P[i][0] - pr.P[i][1] * f) + z[2 + i] for i in range(N)]
    out = (ZERO, t1 * f + t2, *xs)
    neg = tuple(k for k, v in enumerate(out) if v < 0)
    return ShiftResult(out, f, neg)


def zero_component_witness(t: EqTableau, z_star: Sequence[Fraction], neg_rows: Sequence[int]):
    """Blend ``z_star`` with the basic (sign-infeasible) solution of ``t``.

    Returns a solution of the equations in which every unit-column component of
    ``neg_rows`` is nonnegative and at least one is zero. The blend weight is
    the smallest one that achieves this.
    """
    N = t.size
    z_star = tuple(Fraction(v) for v in z_star)
    if len(z_star) != 2 * N:
        raise ValueError(f"z has length {len(z_star)}, expected {2 * N}")
    if t.rows[N][-1] != 0:
        raise HypothesisViolation("gap-row right-hand side must be zero")
    if any(residuals(t, z_star)):
        raise HypothesisViolation("z_star does not solve the equations")
    if not neg_rows:
        raise HypothesisViolation("no rows listed")
    units = unit_columns(t)
    for i in neg_rows:
        if t.rows[i][-1] >= 0:
            raise HypothesisViolation(f"row {i} does not have a negative right-hand side")
    cols = [units[i] for i in neg_rows]
    if any(z_star[j] == 0 for j in cols):
        return z_star
    z_hat = [ZERO] * (2 * N)
    for i, j in enumerate(units):
        z_hat[j] = t.rows[i][-1]
    lam = max(-t.rows[i][-1] / (z_star[j] - t.rows[i][-1]) for i, j in zip(neg_rows, cols))
    return tuple(lam * a + (1 - lam) * h for a, h in zip(z_star, z_hat))


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[Row, ...]:
    """Reduced row echelon form with zero rows dropped."""
    mat = [list(map(Fraction, r)) for r in rows]
    if not mat:
        return ()
    width = len(mat[0])
    lead = 0
    for c in range(width):
        p = next((i for i in range(lead, len(mat)) if mat[i][c] != 0), None)
        if p is None:
            continue
        mat[lead], mat[p] = mat[p], mat[lead]
        pv = mat[lead][c]
        mat[lead] = [v / pv for v in mat[lead]]
        for i in range(len(mat)):
            if i != lead and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[lead])]
        lead += 1
        if lead == len(mat):
            break
    return tuple(tuple(r) for r in mat[:lead])


def same_row_space(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> bool:
    return rref(a) == rref(b)
