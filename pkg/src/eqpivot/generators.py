"""Deterministic instance generators.

Every concrete :class:`GeneratorSpec` has a string id from which it can be
rebuilt, so any instance in a campaign can be regenerated from its id alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .model import Constraint, GeneralLp

KINDS = ("klee-minty", "beale", "random", "degenerate", "paper")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    d: int = 1
    base: int = 5
    factor: int = 2  # Klee-Minty coupling factor; 4 gives the classic worst case
    seed: Optional[int] = None
    m: Optional[int] = None
    n: Optional[int] = None
    max_m: int = 8
    max_n: int = 8
    magnitude: int = 5
    density: float = 1.0
    max_den: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.base < 1 or self.factor < 1:
            raise ValueError("base and factor must be >= 1")
        if self.magnitude < 1 or self.max_den < 1:
            raise ValueError("magnitude and max_den must be >= 1")
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        for name in ("m", "n"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def randomized(self) -> bool:
        return self.kind in ("random", "degenerate")

    def resolve(self, seed: int) -> "GeneratorSpec":
        """Fix the seed and, when left open, draw m and n from it."""
        if not self.randomized:
            return self
        seed = self.seed if self.seed is not None else seed
        rng = random.Random(f"shape:{seed}")
        m = self.m if self.m is not None else rng.randint(1, self.max_m)
        n = self.n if self.n is not None else rng.randint(1, self.max_n)
        return replace(self, seed=seed, m=m, n=n)

    def instance_id(self) -> str:
        if self.kind == "klee-minty":
            tail = f",factor={self.factor}" if self.factor != 2 else ""
            return f"klee-minty:d={self.d},base={self.base}{tail}"
        if self.kind in ("beale", "paper"):
            return self.kind
        if self.seed is None or self.m is None or self.n is None:
            raise ValueError("resolve() a random spec before asking for its id")
        return (
            f"{self.kind}:seed={self.seed},m={self.m},n={self.n},mag={self.magnitude},"
            f"density={self.density!r},den={self.max_den}"
        )

    @classmethod
    def from_id(cls, ident: str) -> "GeneratorSpec":
        kind, _, rest = ident.partition(":")
        kw = {}
        names = {"mag": "magnitude", "den": "max_den"}
        types = {f.name: f.type for f in fields(cls)}
        for item in filter(None, rest.split(",")):
            key, _, val = item.partition("=")
            key = names.get(key, key)
            if key not in types:
                raise ValueError(f"bad instance id field {key!r}")
            kw[key] = float(val) if key == "density" else int(val)
        return cls(kind, **kw)


def worked_instance() -> GeneralLp:
    return GeneralLp(
        "max",
        (2, 1),
        (Constraint((1, 1), "<=", 5), Constraint((1, 0), "<=", 2)),
    )


def klee_minty(d: int, base: int = 5, factor: int = 2) -> GeneralLp:
    """max sum 2^(d-j) x_j  s.t.  factor * sum_{j<i} 2^(i-j-1) x_j + x_i <= base^i  (1-based i, j).

    The optimum is base^d at x = (0, ..., 0, base^d). With ``factor=4`` the
    largest-coefficient simplex rule visits all 2^d vertices.
    """
    c = tuple(2 ** (d - j) for j in range(1, d + 1))
    cons = []
    for i in range(1, d + 1):
        row = [0] * d
        for j in range(1, i):
            row[j - 1] = factor * 2 ** (i - j - 1)
        row[i - 1] = 1
        cons.append(Constraint(tuple(row), "<=", base**i))
    return GeneralLp("max", c, tuple(cons))


def beale() -> GeneralLp:
    """Beale's cycling example; x1..x3 of the textbook form are the slacks here."""
    F = Fraction
    return GeneralLp(
        "min",
        (F(-3, 4), 150, F(-1, 50), 6),
        (
            Constraint((F(1, 4), -60, F(-1, 25), 9), "<=", 0),
            Constraint((F(1, 2), -90, F(-1, 50), 3), "<=", 0),
            Constraint((0, 0, 1, 0), "<=", 1),
        ),
    )


def _random_lp(spec: GeneratorSpec) -> GeneralLp:
    rng = random.Random(spec.instance_id())
    mag = spec.magnitude

    def entry(allow_zero_skip=True):
        if allow_zero_skip and rng.random() >= spec.density:
            return Fraction(0)
        num = rng.randint(-mag, mag)
        den = rng.randint(1, spec.max_den)
        return Fraction(num, den)

    m, n = spec.m, spec.n
    A = [[entry() for _ in range(n)] for _ in range(m)]
    c = [entry(False) for _ in range(n)]
    if spec.kind == "degenerate":
        b = [Fraction(0) if rng.random() < 0.5 else abs(entry(False)) for _ in range(m)]
    else:
        # mostly nonnegative right-hand sides keep infeasible instances a minority
        b = [entry(False) if rng.random() < 0.25 else abs(entry(False)) for _ in range(m)]
    cons = tuple(Constraint(tuple(row), "<=", bi) for row, bi in zip(A, b))
    return GeneralLp("max", tuple(c), cons)


def generate(spec: GeneratorSpec) -> GeneralLp:
    if spec.kind == "paper":
        return worked_instance()
    if spec.kind == "klee-minty":
        return klee_minty(spec.d, spec.base, spec.factor)
    if spec.kind == "beale":
        return beale()
    if spec.seed is None or spec.m is None or spec.n is None:
        spec = spec.resolve(spec.seed if spec.seed is not None else 0)
    return _random_lp(spec)


def regenerate(ident: str) -> GeneralLp:
    return generate(GeneratorSpec.from_id(ident))


def corpus(specs: Iterable[GeneratorSpec], count: int, seed_base: int = 0) -> Iterator[tuple[str, GeneralLp]]:
    """Yield ``count`` instances cycling through ``specs``; the i-th random one gets seed ``seed_base + i``."""
    specs = list(specs)
    if count < 1:
        raise ValueError("count must be >= 1")
    if not specs:
        raise ValueError("need at least one spec")
    for i in range(count):
        spec = specs[i % len(specs)].resolve(seed_base + i)
        yield spec.instance_id(), generate(spec)
