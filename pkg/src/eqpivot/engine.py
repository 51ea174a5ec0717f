"""Complementary pivoting on the primal-dual tableau (MajorP / MinorP loop).

The loop, in order of precedence:

* solved state (all right-hand sides of the equality rows nonnegative, gap rhs
  zero, full complementary basis): read off z and verify it against the
  untouched ``theta = 0`` system before reporting ``Solved``;
* gap rhs nonzero: MajorP. Normalize the gap row's sign, choose the column with
  the largest positive gap entry (smallest index on ties) and pivot it in where
  its complement is basic;
* otherwise MinorP: among rows with negative rhs (smallest magnitude first,
  then smallest index) pivot in the complement of the row's basic column. When
  every such complement has a zero gap entry, apply the gap-row fix or, failing
  that, drop one complementary pair and its row and continue on the smaller
  system.

Claimed properties (at most m + n MajorP selections, no repeated selection)
are tracked as events instead of being assumed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .model import CanonicalLp, format_rational, parse_rational
from .tableau import (
    EqTableau,
    basic_solution,
    build_eq,
    complement,
    gj_pivot,
    split_solution,
    verify_eq_solution,
)

MAJOR = "MajorP"
MINOR = "MinorP"

FRESH = "Fresh"
REVERSAL = "Reversal"
REPEAT = "Repeat"

SOLVED = "Solved"
NO_SOLUTION = "NoSolution"
REDUCED = "Reduced"
FALSIFIED = "Falsified"
PIVOT_CAP = "PivotCapExceeded"

REPEAT_SELECTION = "RepeatSelection"
BOUND_VIOLATED = "IterationBoundViolated"
STALLED = "Stalled"
UNDERDETERMINED = "UnderdeterminedStep"
FALSIFICATION_KINDS = frozenset({REPEAT_SELECTION, BOUND_VIOLATED, STALLED})

# minorp_select signals
NO_NEGATIVE_Q = "NoNegativeQ"
ALL_BOTTOM_ZERO = "AllBottomZero"
BLOCKED = "Blocked"


class TraceMismatch(ValueError):
    def __init__(self, step: int, message: str = "snapshot mismatch"):
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class EngineConfig:
    theta: Fraction = Fraction(1)
    pivot_cap: Optional[int] = None  # default 4 (m + n)
    snapshots: str = "full"  # "full" or "elided"
    max_reductions: Optional[int] = None  # default m + n

    def __post_init__(self):
        object.__setattr__(self, "theta", Fraction(self.theta))
        if self.theta < 0:
            raise ValueError("theta must be nonnegative")
        if self.snapshots not in ("full", "elided"):
            raise ValueError("snapshots must be 'full' or 'elided'")

    def cap_for(self, size: int) -> int:
        cap = 4 * size if self.pivot_cap is None else self.pivot_cap
        if cap < size:
            raise ValueError(f"pivot cap {cap} is below m + n = {size}")
        return cap

    def to_json(self) -> dict:
        return {
            "theta": format_rational(self.theta),
            "pivotCap": self.pivot_cap,
            "snapshots": self.snapshots,
            "maxReductions": self.max_reductions,
        }

    @classmethod
    def from_json(cls, data: dict) -> "EngineConfig":
        return cls(
            parse_rational(data["theta"]),
            data.get("pivotCap"),
            data.get("snapshots", "full"),
            data.get("maxReductions"),
        )


@dataclass(frozen=True)
class Selection:
    phase: str
    column: int  # column index in the original (unreduced) system
    row: int
    step: int


@dataclass
class SelectionHistory:
    size: int
    entries: list[Selection] = field(default_factory=list)

    def add(self, sel: Selection) -> None:
        self.entries.append(sel)

    @property
    def major_columns(self) -> list[int]:
        return [s.column for s in self.entries if s.phase == MAJOR]

    @property
    def reversed_columns(self) -> list[int]:
        """MajorP columns whose complement was pivoted in later."""
        out = []
        for k, s in enumerate(self.entries):
            later = {e.column for e in self.entries[k + 1:]}
            if s.phase == MAJOR and complement(s.column, self.size) in later:
                out.append(s.column)
        return out


def classify_selection(history: SelectionHistory, column: int) -> str:
    majors = history.major_columns
    if column in majors:
        return REPEAT
    if complement(column, history.size) in majors:
        return REVERSAL
    return FRESH


@dataclass(frozen=True)
class Event:
    kind: str
    step: int
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "step": self.step, "detail": self.detail}


@dataclass(frozen=True)
class Step:
    index: int
    op: str  # pivot | negate-gap | gap-fix | reduce | stop
    phase: str
    row: Optional[int] = None
    col: Optional[int] = None
    classification: Optional[str] = None
    epsilon: Optional[Fraction] = None
    rationale: str = ""
    snapshot: Optional[EqTableau] = None
    gap_row: Optional[tuple[Fraction, ...]] = None
    rhs: Optional[tuple[Fraction, ...]] = None

    def to_json(self) -> dict:
        out = {
            "step": self.index,
            "op": self.op,
            "phase": self.phase,
            "pivotRow": self.row,
            "pivotCol": self.col,
            "classification": self.classification,
            "rationale": self.rationale,
        }
        if self.epsilon is not None:
            out["epsilon"] = format_rational(self.epsilon)
        if self.snapshot is not None:
            out["snapshot"] = self.snapshot.to_json()
        if self.gap_row is not None:
            out["gapRow"] = [format_rational(v) for v in self.gap_row]
            out["rhs"] = [format_rational(v) for v in self.rhs]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "Step":
        def vec(key):
            return None if key not in d else tuple(parse_rational(v) for v in d[key])

        return cls(
            index=d["step"],
            op=d["op"],
            phase=d["phase"],
            row=d.get("pivotRow"),
            col=d.get("pivotCol"),
            classification=d.get("classification"),
            epsilon=parse_rational(d["epsilon"]) if "epsilon" in d else None,
            rationale=d.get("rationale", ""),
            snapshot=EqTableau.from_json(d["snapshot"]) if "snapshot" in d else None,
            gap_row=vec("gapRow"),
            rhs=vec("rhs"),
        )


@dataclass
class PivotTrace:
    lp: CanonicalLp
    config: EngineConfig
    initial: EqTableau
    steps: list[Step] = field(default_factory=list)

    def header_json(self) -> dict:
        lp = self.lp
        return {
            "instance": {
                "A": [[format_rational(v) for v in row] for row in lp.A],
                "b": [format_rational(v) for v in lp.b],
                "c": [format_rational(v) for v in lp.c],
            },
            "config": self.config.to_json(),
            "initial": self.initial.to_json(),
        }

    def dumps(self) -> str:
        lines = [json.dumps(self.header_json(), sort_keys=True)]
        lines += [json.dumps(s.to_json(), sort_keys=True) for s in self.steps]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "PivotTrace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty trace")
        head = json.loads(lines[0])
        inst = head["instance"]
        lp = CanonicalLp(
            [[parse_rational(v) for v in row] for row in inst["A"]],
            [parse_rational(v) for v in inst["b"]],
            [parse_rational(v) for v in inst["c"]],
        )
        initial = EqTableau.from_json(head["initial"])
        steps = [Step.from_json(json.loads(ln)) for ln in lines[1:]]
        return cls(lp, EngineConfig.from_json(head["config"]), initial, steps)


@dataclass
class RunResult:
    status: str
    major_count: int
    minor_count: int
    total_pivots: int
    trace: PivotTrace
    events: list[Event] = field(default_factory=list)
    z: Optional[tuple[Fraction, ...]] = None
    x: Optional[tuple[Fraction, ...]] = None
    y: Optional[tuple[Fraction, ...]] = None
    objective: Optional[Fraction] = None
    kind: Optional[str] = None  # falsification kind for status Falsified
    reduced: Optional[EqTableau] = None
    reductions: int = 0
    detail: str = ""

    @property
    def size(self) -> int:
        return self.trace.lp.m + self.trace.lp.n

    @property
    def bound_holds(self) -> bool:
        return self.major_count <= self.size

    @property
    def falsification_kinds(self) -> list[str]:
        kinds = [e.kind for e in self.events if e.kind in FALSIFICATION_KINDS]
        if self.status == FALSIFIED and self.kind not in kinds:
            kinds.append(self.kind)
        return kinds


@dataclass(frozen=True)
class ReduceProblem:
    row: int
    columns: tuple[int, int]  # the complementary pair to drop


# ---------------------------------------------------------------- selection rules


def majorp_select(t: EqTableau) -> Optional[int]:
    """Smallest column index attaining the largest positive gap-row entry, or None."""
    N = t.size
    if t.rows[N][-1] <= 0:
        raise ValueError("MajorP needs a positive gap-row right-hand side")
    gap = t.bottom
    best = max((v for v in gap if v > 0), default=None)
    if best is None:
        return None
    return gap.index(best)


def majorp_row(t: EqTableau, j: int) -> tuple[Optional[int], bool]:
    """Pivot row for MajorP column ``j`` and whether the fallback rule was needed."""
    N = t.size
    partner = complement(j, N)
    if partner in t.basis:
        r = t.basis.index(partner)
        if t.rows[r][j] != 0:
            return r, False
        return None, True
    for i in range(N):
        if t.rows[i][j] > 0:
            return i, True
    return None, True


def majorp_pivot(t: EqTableau, j: int) -> EqTableau:
    row, fallback = majorp_row(t, j)
    if row is None or fallback:
        raise ValueError(f"complement of column {j} is not basic with a nonzero pivot")
    return gj_pivot(t, row, j)


def minorp_candidates(t: EqTableau) -> list[int]:
    q = t.q
    neg = [i for i in range(t.size) if q[i] < 0]
    return sorted(neg, key=lambda i: (-q[i], i))


def minorp_select(t: EqTableau) -> Union[tuple[int, int], str]:
    """(row, column) for the MinorP pivot, or one of the signals
    ``NO_NEGATIVE_Q``, ``ALL_BOTTOM_ZERO``, ``BLOCKED``."""
    N = t.size
    cands = minorp_candidates(t)
    if not cands:
        return NO_NEGATIVE_Q
    gap_ok = False
    for i in cands:
        b = t.basis[i]
        if b is None:
            continue
        c = complement(b, N)
        if t.rows[N][c] == 0:
            continue
        gap_ok = True
        if t.rows[i][c] != 0:
            return i, c
    return BLOCKED if gap_ok else ALL_BOTTOM_ZERO


def gap_fix_epsilon(gap, row) -> Fraction:
    """Half the largest step along ``row`` that keeps every positive gap entry positive."""
    ratios = [g / -a for g, a in zip(gap, row) if g > 0 and a < 0]
    return min(ratios) / 2 if ratios else Fraction(1)


def _row_of(k: int, N: int) -> int:
    return k if k < N else k - N


def degenerate_fix(t: EqTableau) -> Union[tuple[EqTableau, int, Fraction], ReduceProblem]:
    """Add a small multiple of a suitable equality row to the gap row.

    Eligible rows are those ``r`` whose column ``r`` or ``r + N`` has a positive
    gap entry while ``q_r > 0``. Rows that also touch a blocked MinorP column are
    preferred. With no eligible row, the pair and row to drop are returned.
    """
    N = t.size
    gap = t.rows[N]
    q = t.q
    eligible = []
    for k in range(2 * N):
        r = _row_of(k, N)
        if gap[k] > 0 and q[r] > 0 and r not in eligible:
            eligible.append(r)
    if eligible:
        blocked = [complement(t.basis[i], N) for i in minorp_candidates(t) if t.basis[i] is not None]
        touching = [r for r in eligible if any(t.rows[r][c] != 0 for c in blocked)]
        r = (touching or eligible)[0]
        eps = gap_fix_epsilon(gap[:-1], t.rows[r][:-1])
        new_gap = tuple(g + eps * a for g, a in zip(gap, t.rows[r]))
        return t.replace(rows=t.rows[:N] + (new_gap,)), r, eps
    cands = minorp_candidates(t)
    row = cands[0] if cands else 0
    return ReduceProblem(row, (row, row + N))


def drop_pair(t: EqTableau, row: int) -> EqTableau:
    """Delete equality row ``row`` together with columns ``row`` and ``row + N``."""
    N = t.size
    gone = (row, row + N)
    if t.basis[row] is not None and t.basis[row] not in gone:
        raise ValueError(f"row {row} is basic in column {t.basis[row]}, outside its pair")
    keep_cols = [j for j in range(2 * N) if j not in gone] + [2 * N]
    rows = [tuple(r[j] for j in keep_cols) for i, r in enumerate(t.rows) if i != row]

    def shift(j):
        return None if j is None else j - sum(1 for g in gone if g < j)

    basis = tuple(shift(b) for i, b in enumerate(t.basis) if i != row)
    m, n = (t.m - 1, t.n) if row < t.m else (t.m, t.n - 1)
    return EqTableau(m, n, tuple(rows), basis)


def negate_gap(t: EqTableau) -> EqTableau:
    N = t.size
    return t.replace(rows=t.rows[:N] + (tuple(-v for v in t.rows[N]),))


def augment_rows(t: EqTableau, theta: Fraction, rows=None) -> EqTableau:
    """Add ``theta`` times the gap row to the given equality rows (default: all).

    Basic columns have zero gap entries, so the basis map is unaffected, and a
    zero gap rhs leaves every right-hand side unchanged.
    """
    N = t.size
    targets = range(N) if rows is None else rows
    gap = t.rows[N]
    new = list(t.rows)
    for i in targets:
        new[i] = tuple(a + theta * g for a, g in zip(new[i], gap))
    return t.replace(rows=new)


def is_solved_state(t: EqTableau) -> bool:
    N = t.size
    q = t.q
    return q[N] == 0 and all(v >= 0 for v in q[:N]) and all(b is not None for b in t.basis)


def apply_step(t: EqTableau, step: Step) -> EqTableau:
    if step.op == "pivot":
        return gj_pivot(t, step.row, step.col)
    if step.op == "negate-gap":
        return negate_gap(t)
    if step.op == "augment":
        return augment_rows(t, step.epsilon, None if step.row is None else [step.row])
    if step.op == "gap-fix":
        N = t.size
        gap = tuple(g + step.epsilon * a for g, a in zip(t.rows[N], t.rows[step.row]))
        return t.replace(rows=t.rows[:N] + (gap,))
    if step.op == "reduce":
        return drop_pair(t, step.row)
    if step.op == "stop":
        return t
    raise ValueError(f"unknown trace op {step.op!r}")


# ---------------------------------------------------------------------- main loop


class _Runner:
    def __init__(self, lp: CanonicalLp, cfg: EngineConfig):
        self.lp = lp
        self.cfg = cfg
        self.theta = cfg.theta
        self.size = lp.m + lp.n
        self.cap = cfg.cap_for(self.size)
        self.max_reductions = self.size if cfg.max_reductions is None else cfg.max_reductions
        self.t0 = build_eq(lp, 0)
        self.t = build_eq(lp, cfg.theta)
        self.trace = PivotTrace(lp, cfg, self.t)
        self.history = SelectionHistory(self.size)
        self.colmap = list(range(2 * self.size))
        self.events: list[Event] = []
        self.major = 0
        self.minor = 0
        self.work = 0
        self.reductions = 0
        self.last_op = "build"

    @property
    def step_no(self) -> int:
        return len(self.trace.steps)

    def record(self, op, phase, **kw) -> None:
        snap = {}
        if self.cfg.snapshots == "full":
            snap["snapshot"] = self.t
        else:
            N = self.t.size
            snap["gap_row"] = self.t.rows[N][:-1]
            snap["rhs"] = self.t.q
        self.trace.steps.append(Step(self.step_no, op, phase, **kw, **snap))
        self.last_op = op

    def note(self, kind, detail) -> None:
        self.events.append(Event(kind, self.step_no, detail))

    def lift(self, z) -> tuple[Fraction, ...]:
        full = [Fraction(0)] * (2 * self.size)
        for j, v in zip(self.colmap, z):
            full[j] = v
        return tuple(full)

    def result(self, status, **kw) -> RunResult:
        return RunResult(
            status,
            self.major,
            self.minor,
            self.major + self.minor,
            self.trace,
            self.events,
            reductions=self.reductions,
            **kw,
        )

    def solved(self, z, detail) -> RunResult:
        y, x, _, _ = split_solution(self.lp.m, self.lp.n, z)
        return self.result(SOLVED, z=z, x=x, y=y, objective=self.lp.objective(x), detail=detail)

    def stalled(self, detail) -> RunResult:
        self.note(STALLED, detail)
        return self.result(FALSIFIED, kind=STALLED, detail=detail)

    def current_solution(self):
        """The current basic solution lifted to the full system, if it verifies."""
        z = basic_solution(self.t)
        if z is None:
            return None
        z = self.lift(z)
        return z if verify_eq_solution(self.t0, z).ok else None

    def augment(self, phase, row=None, why="") -> None:
        self.t = augment_rows(self.t, self.theta, None if row is None else [row])
        self.record("augment", phase, row=row, epsilon=self.theta, rationale=why)

    def pivot(self, phase, row, col, classification, rationale) -> None:
        self.t = gj_pivot(self.t, row, col)
        self.work += 1
        self.history.add(Selection(phase, self.colmap[col], row, self.step_no))
        self.record("pivot", phase, row=row, col=col, classification=classification, rationale=rationale)

    def major_step(self) -> Optional[RunResult]:
        t = self.t
        N = t.size
        if t.rows[N][-1] < 0:
            self.t = t = negate_gap(t)
            self.record("negate-gap", MAJOR, rationale="gap rhs negative")
        j = majorp_select(t)
        if j is None:
            return self.result(NO_SOLUTION, detail="no positive gap-row entry")
        orig = self.colmap[j]
        cls = classify_selection(self.history, orig)
        if cls == REVERSAL:
            self.record("stop", MAJOR, col=j, classification=cls, rationale="selection reverses an earlier MajorP")
            z = self.current_solution()
            if z is not None:
                return self.solved(z, "MajorP reversal at a verified solution")
            return self.result(NO_SOLUTION, detail=f"MajorP reversal of column {orig}")
        if cls == REPEAT:
            self.record("stop", MAJOR, col=j, classification=cls, rationale="selection repeats an earlier MajorP")
            self.events.append(Event(REPEAT_SELECTION, self.step_no - 1, f"column {orig}"))
            return self.result(FALSIFIED, kind=REPEAT_SELECTION, detail=f"MajorP repeated column {orig}")
        row, fallback = majorp_row(t, j)
        if fallback:
            partner = complement(j, N)
            if row is None and partner in t.basis and self.theta > 0:
                # complement basic but the entry is zero: the gap row's entry is
                # positive, so a theta-multiple of it makes the pivot usable
                row = t.basis.index(partner)
                self.note(UNDERDETERMINED, f"MajorP column {j}: zero entry in row {row}, row augmented")
                self.augment(MAJOR, row, "zero MajorP pivot entry")
            elif row is not None:
                self.note(UNDERDETERMINED, f"MajorP column {j}: complement not basic, pivot row {row}")
            else:
                return self.stalled(f"no usable pivot row for MajorP column {j}")
        self.pivot(MAJOR, row, j, cls, f"largest gap entry {self.t.rows[N][j]}")
        self.major += 1
        if self.major == self.size + 1:
            self.note(BOUND_VIOLATED, f"{self.major} MajorP selections exceed m + n = {self.size}")
        return None

    def minor_step(self) -> Optional[RunResult]:
        N = self.t.size
        if self.last_op == "pivot" and self.theta > 0:
            self.augment(MINOR, None, "new MinorP instance")
        t = self.t
        sel = minorp_select(t)
        if sel == BLOCKED and self.theta > 0:
            i = next(i for i in minorp_candidates(t) if t.basis[i] is not None and t.rows[N][complement(t.basis[i], N)] != 0)
            self.note(UNDERDETERMINED, f"MinorP row {i}: zero pivot entry, row augmented")
            self.augment(MINOR, i, "zero MinorP pivot entry")
            t = self.t
            sel = (i, complement(t.basis[i], N))
        if isinstance(sel, tuple):
            row, col = sel
            self.pivot(MINOR, row, col, None, f"row {row} rhs {t.rows[row][-1]}")
            self.minor += 1
            return None
        if sel in (NO_NEGATIVE_Q, BLOCKED):
            return self.stalled(f"MinorP has no move ({sel})")
        fix = degenerate_fix(t)
        if isinstance(fix, ReduceProblem):
            if self.reductions >= self.max_reductions:
                return self.result(REDUCED, reduced=t, detail="reduction depth exhausted")
            try:
                self.t = drop_pair(t, fix.row)
            except ValueError as exc:
                return self.result(REDUCED, reduced=t, detail=str(exc))
            del self.colmap[fix.row + N]
            del self.colmap[fix.row]
            self.reductions += 1
            self.work += 1
            self.record("reduce", MINOR, row=fix.row, rationale=f"drop pair {fix.columns}")
            return None
        self.t, r, eps = fix
        self.work += 1
        self.record("gap-fix", MINOR, row=r, epsilon=eps, rationale="all candidate gap entries zero")
        return None

    def run(self) -> RunResult:
        while True:
            t = self.t
            if is_solved_state(t):
                z = self.lift(basic_solution(t))
                if verify_eq_solution(self.t0, z).ok:
                    return self.solved(z, "all right-hand sides feasible")
                if self.reductions:
                    return self.result(REDUCED, reduced=t, detail="reduced system's solution does not lift")
                return self.stalled("basic solution failed verification")
            if self.work >= self.cap:
                return self.result(PIVOT_CAP, detail=f"stopped after {self.work} steps")
            if t.rows[t.size][-1] != 0:
                out = self.major_step()
            else:
                out = self.minor_step()
            if out is not None:
                return out


def run(lp: CanonicalLp, cfg: Optional[EngineConfig] = None) -> RunResult:
    return _Runner(lp, cfg or EngineConfig()).run()


def replay(trace: PivotTrace) -> list[EqTableau]:
    """Re-apply every recorded step from the initial tableau, checking each snapshot."""
    t = build_eq(trace.lp, trace.config.theta)
    if t != trace.initial:
        raise TraceMismatch(-1, "initial tableau does not match the instance")
    out = [t]
    for step in trace.steps:
        t = apply_step(t, step)
        if step.snapshot is not None and step.snapshot != t:
            raise TraceMismatch(step.index)
        if step.gap_row is not None:
            N = t.size
            if step.gap_row != t.rows[N][:-1] or step.rhs != t.q:
                raise TraceMismatch(step.index)
        out.append(t)
    return out
