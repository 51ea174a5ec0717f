from fractions import Fraction as F

import pytest
from hypothesis import given

from eqpivot.model import (
    CanonicalLp,
    Constraint,
    GeneralLp,
    LpSyntaxError,
    canonicalize,
    emit_instance,
    format_rational,
    parse_instance,
    parse_rational,
)
from helpers import general_lps

WORKED_TEXT = """\
# the worked instance
sense: max
vars: 2
c: 2 1
1 1 <= 5
1 0 <= 2
"""


def test_parse_worked_instance():
    lp = parse_instance(WORKED_TEXT)
    assert lp.sense == "max"
    assert lp.c == (2, 1)
    assert [c.rhs for c in lp.constraints] == [5, 2]
    clp = canonicalize(lp)
    assert clp.A == ((1, 1), (1, 0))
    assert clp.b == (5, 2)


@pytest.mark.parametrize("tok,val", [("3", F(3)), ("-2/4", F(-1, 2)), ("+7/3", F(7, 3)), ("0", F(0))])
def test_parse_rational(tok, val):
    assert parse_rational(tok) == val


@pytest.mark.parametrize("tok", ["1.5", "a", "1/", "", "2e3"])
def test_parse_rational_rejects(tok):
    with pytest.raises(ValueError):
        parse_rational(tok)


def test_format_rational():
    assert format_rational(F(6, 4)) == "3/2"
    assert format_rational(F(-4, 2)) == "-2"


@pytest.mark.parametrize(
    "text,line",
    [
        ("sense: max\nvars: 2\nc: 1 x\n", 3),
        ("sense: max\nvars: 2\n1 2 3 <= 4\n", 3),
        ("sense: up\n", 1),
        ("sense: max\nvars: 1\nc: 1\n1 <= 1/0\n", 4),
        ("sense: max\nvars: 2\n1 2 5\n", 3),
    ],
)
def test_syntax_errors_carry_location(text, line):
    with pytest.raises(LpSyntaxError) as err:
        parse_instance(text)
    assert err.value.line == line
    assert err.value.column >= 1


def test_missing_headers():
    with pytest.raises(LpSyntaxError):
        parse_instance("vars: 1\n1 <= 1\n")
    with pytest.raises(LpSyntaxError):
        parse_instance("sense: min\n")


def test_canonicalize_relations_and_sense():
    lp = GeneralLp(
        "min",
        (1, -2),
        (Constraint((1, 1), ">=", 3), Constraint((1, -1), "=", 1)),
    )
    clp = canonicalize(lp)
    assert clp.c == (-1, 2)
    assert clp.A == ((-1, -1), (1, -1), (-1, 1))
    assert clp.b == (-3, 1, -1)
    assert clp.row_map == ((0, -1), (1, 1), (1, -1))
    assert clp.original_objective((F(2), F(1))) == 0


def test_free_variable_split_and_lift():
    lp = GeneralLp("max", (1, 1), (Constraint((1, 1), "<=", 4),), free={0})
    clp = canonicalize(lp)
    assert clp.n == 3
    assert clp.var_map == ((0, 1), (0, -1), (1, 1))
    assert clp.A == ((1, -1, 1),)
    assert clp.original_x((F(1), F(3), F(2))) == (F(-2), F(2))


def test_canonical_shape_checks():
    with pytest.raises(ValueError):
        CanonicalLp([[1, 2]], [1, 2], [1, 1])
    with pytest.raises(ValueError):
        GeneralLp("max", (1,), (Constraint((1, 2), "<=", 1),))


@given(general_lps())
def test_emit_parse_roundtrip(lp):
    assert parse_instance(emit_instance(lp)) == lp


@given(general_lps())
def test_emit_is_deterministic(lp):
    assert emit_instance(lp) == emit_instance(parse_instance(emit_instance(lp)))


@given(general_lps())
def test_canonical_dimensions(lp):
    clp = canonicalize(lp)
    extra_rows = sum(1 for c in lp.constraints if c.relation == "=")
    assert clp.m == lp.m + extra_rows
    assert clp.n == lp.n + len(lp.free)
    assert clp.n_original == lp.n
