"""Exact-rational LP instances, canonicalization and the line-oriented text format.

Text format::

    sense: max
    vars: 2
    c: 2 1
    1 1 <= 5
    1 0 <= 2
    free: 1

Numbers are integers or ``p/q``. ``free`` lists 1-based variable indices.
Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

RELATIONS = ("<=", "=", ">=")

_NUMBER = re.compile(r"^[+-]?\d+(/[+-]?\d+)?$")


class LpSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def parse_rational(token: str) -> Fraction:
    """Parse an integer or ``p/q`` literal exactly. Floats are rejected."""
    token = token.strip()
    if not _NUMBER.match(token):
        raise ValueError(f"not an exact rational literal: {token!r}")
    if "/" in token:
        num, den = token.split("/")
        if int(den) == 0:
            raise ZeroDivisionError(f"zero denominator in {token!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(token))


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


def _vec(values) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _vec(self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")


@dataclass(frozen=True)
class GeneralLp:
    sense: str
    c: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...] = ()
    free: frozenset[int] = frozenset()  # 0-based variable indices

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be max or min, got {self.sense!r}")
        object.__setattr__(self, "c", _vec(self.c))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "free", frozenset(self.free))
        n = len(self.c)
        for k, con in enumerate(self.constraints):
            if len(con.coeffs) != n:
                raise ValueError(f"constraint {k} has {len(con.coeffs)} coefficients, expected {n}")
        if any(not 0 <= i < n for i in self.free):
            raise ValueError("free variable index out of range")

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.constraints)

    @classmethod
    def from_canonical(cls, A, b, c) -> "GeneralLp":
        cons = tuple(Constraint(row, "<=", rhs) for row, rhs in zip(A, b))
        return cls("max", c, cons)


@dataclass(frozen=True)
class CanonicalLp:
    """maximize c.x subject to A x <= b, x >= 0."""

    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    c: tuple[Fraction, ...]
    # column j of A is sign * original variable var_map[j][0]
    var_map: tuple[tuple[int, int], ...] = field(default=(), compare=False)
    # row i of A is sign * original constraint row_map[i][0]
    row_map: tuple[tuple[int, int], ...] = field(default=(), compare=False)
    objective_sign: int = field(default=1, compare=False)
    n_original: int = field(default=-1, compare=False)

    def __post_init__(self):
        A = tuple(_vec(row) for row in self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", _vec(self.b))
        object.__setattr__(self, "c", _vec(self.c))
        if len(A) != len(self.b):
            raise ValueError("A and b disagree on m")
        if any(len(row) != len(self.c) for row in A):
            raise ValueError("A and c disagree on n")
        if not self.var_map:
            object.__setattr__(self, "var_map", tuple((j, 1) for j in range(len(self.c))))
        if not self.row_map:
            object.__setattr__(self, "row_map", tuple((i, 1) for i in range(len(A))))
        if self.n_original < 0:
            object.__setattr__(self, "n_original", len(self.c))

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def n(self) -> int:
        return len(self.c)

    def objective(self, x: Sequence[Fraction]) -> Fraction:
        return sum((cj * xj for cj, xj in zip(self.c, x)), Fraction(0))

    def original_x(self, x: Sequence[Fraction]) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.n_original
        for xj, (var, sign) in zip(x, self.var_map):
            out[var] += sign * xj
        return tuple(out)

    def original_objective(self, x: Sequence[Fraction]) -> Fraction:
        return self.objective_sign * self.objective(x)


def canonicalize(lp: GeneralLp) -> CanonicalLp:
    var_map: list[tuple[int, int]] = []
    for j in range(lp.n):
        var_map.append((j, 1))
        if j in lp.free:
            var_map.append((j, -1))

    def expand(coeffs):
        return [sign * coeffs[var] for var, sign in var_map]

    obj_sign = 1 if lp.sense == "max" else -1
    c = [obj_sign * v for v in expand(lp.c)]
    A, b, row_map = [], [], []
    for k, con in enumerate(lp.constraints):
        row = expand(con.coeffs)
        if con.relation in ("<=", "="):
            A.append(row)
            b.append(con.rhs)
            row_map.append((k, 1))
        if con.relation in (">=", "="):
            A.append([-v for v in row])
            b.append(-con.rhs)
            row_map.append((k, -1))
    return CanonicalLp(A, b, c, tuple(var_map), tuple(row_map), obj_sign, lp.n)


def parse_instance(text: str) -> GeneralLp:
    sense = None
    nvars = None
    c = None
    free: set[int] = set()
    constraints: list[Constraint] = []

    def numbers(tokens, lineno, line):
        out = []
        for tok in tokens:
            col = line.find(tok) + 1
            try:
                out.append(parse_rational(tok))
            except ZeroDivisionError as exc:
                raise LpSyntaxError(str(exc), lineno, col) from None
            except ValueError:
                raise LpSyntaxError(f"bad number {tok!r}", lineno, col) from None
        return out

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head, sep, rest = line.partition(":")
        key = head.strip()
        if sep and key in ("sense", "vars", "c", "free"):
            col = line.index(":") + 2
            tokens = rest.split()
            if key == "sense":
                if tokens not in (["max"], ["min"]):
                    raise LpSyntaxError("sense must be max or min", lineno, col)
                sense = tokens[0]
            elif key == "vars":
                if len(tokens) != 1 or not tokens[0].isdigit():
                    raise LpSyntaxError("vars expects one nonnegative integer", lineno, col)
                nvars = int(tokens[0])
            elif key == "c":
                c = numbers(tokens, lineno, line)
            else:
                for tok in tokens:
                    if not tok.isdigit() or int(tok) < 1:
                        raise LpSyntaxError(f"bad free index {tok!r}", lineno, line.find(tok) + 1)
                    free.add(int(tok) - 1)
            continue
        tokens = line.split()
        rel_at = [i for i, tok in enumerate(tokens) if tok in RELATIONS]
        if len(rel_at) != 1 or rel_at[0] != len(tokens) - 2:
            raise LpSyntaxError("expected '<coeffs> <rel> <rhs>'", lineno, 1)
        if nvars is None:
            raise LpSyntaxError("constraint before 'vars:' header", lineno, 1)
        k = rel_at[0]
        coeffs = numbers(tokens[:k], lineno, line)
        if len(coeffs) != nvars:
            raise LpSyntaxError(f"expected {nvars} coefficients, got {len(coeffs)}", lineno, 1)
        rhs = numbers(tokens[k + 1:], lineno, line)[0]
        constraints.append(Constraint(tuple(coeffs), tokens[k], rhs))

    if sense is None:
        raise LpSyntaxError("missing 'sense:' header", 1, 1)
    if nvars is None:
        raise LpSyntaxError("missing 'vars:' header", 1, 1)
    if c is None:
        c = [Fraction(0)] * nvars
    if len(c) != nvars:
        raise LpSyntaxError(f"objective has {len(c)} entries, expected {nvars}", 1, 1)
    if any(i >= nvars for i in free):
        raise LpSyntaxError("free index exceeds vars", 1, 1)
    return GeneralLp(sense, tuple(c), tuple(constraints), frozenset(free))


def emit_instance(lp: GeneralLp) -> str:
    lines = [f"sense: {lp.sense}", f"vars: {lp.n}"]
    lines.append(" ".join(["c:"] + [format_rational(v) for v in lp.c]))
    for con in lp.constraints:
        parts = [format_rational(v) for v in con.coeffs]
        parts += [con.relation, format_rational(con.rhs)]
        lines.append(" ".join(parts))
    if lp.free:
        lines.append(" ".join(["free:"] + [str(i + 1) for i in sorted(lp.free)]))
    return "\n".join(lines) + "\n"
