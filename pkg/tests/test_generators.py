import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqpivot.generators import (
    GeneratorSpec,
    beale,
    corpus,
    generate,
    klee_minty,
    worked_instance,
    regenerate,
)
from eqpivot.model import canonicalize


def test_worked_instance():
    lp = worked_instance()
    assert lp.c == (2, 1) and lp.m == 2


def test_klee_minty_shape():
    lp = klee_minty(3)
    assert lp.c == (4, 2, 1)
    assert [c.coeffs for c in lp.constraints] == [(1, 0, 0), (2, 1, 0), (4, 2, 1)]
    assert [c.rhs for c in lp.constraints] == [5, 25, 125]


def test_klee_minty_base_parameter():
    assert [c.rhs for c in klee_minty(2, base=10).constraints] == [10, 100]


def test_klee_minty_classic_factor():
    lp = klee_minty(3, factor=4)
    assert [c.coeffs for c in lp.constraints] == [(1, 0, 0), (4, 1, 0), (8, 4, 1)]
    spec = GeneratorSpec("klee-minty", d=3, factor=4)
    assert spec.instance_id() == "klee-minty:d=3,base=5,factor=4"
    assert regenerate(spec.instance_id()) == lp


def test_beale_shape():
    clp = canonicalize(beale())
    # 3 constraints, 4 structural variables plus 3 slacks
    assert (clp.m, clp.n) == (3, 4)


@given(st.integers(0, 10_000), st.sampled_from(["random", "degenerate"]))
def test_ids_regenerate(seed, kind):
    spec = GeneratorSpec(kind).resolve(seed)
    assert GeneratorSpec.from_id(spec.instance_id()) == spec
    assert regenerate(spec.instance_id()) == generate(spec)


@given(st.integers(0, 10_000))
def test_resolve_respects_bounds(seed):
    spec = GeneratorSpec("random", max_m=3, max_n=2).resolve(seed)
    lp = generate(spec)
    assert 1 <= lp.m <= 3 and 1 <= lp.n <= 2
    assert all(abs(v) <= 5 for con in lp.constraints for v in con.coeffs)


def test_fixed_dimensions_and_denominators():
    lp = generate(GeneratorSpec("random", seed=3, m=4, n=6, max_den=10))
    assert (lp.m, lp.n) == (4, 6)
    assert all(v.denominator <= 10 for con in lp.constraints for v in con.coeffs)


def test_degenerate_has_zero_rhs():
    zeros = 0
    for seed in range(40):
        lp = generate(GeneratorSpec("degenerate", seed=seed, m=4, n=3))
        zeros += sum(con.rhs == 0 for con in lp.constraints)
        assert all(con.rhs >= 0 for con in lp.constraints)
    assert zeros > 40


def test_corpus_seeds_and_cycling():
    specs = [GeneratorSpec("random"), GeneratorSpec("paper")]
    items = list(corpus(specs, 4, seed_base=10))
    assert items[1][0] == "paper" and items[3][0] == "paper"
    assert items[0][0].startswith("random:seed=10,")
    assert items[2][0].startswith("random:seed=12,")
    assert items == list(corpus(specs, 4, seed_base=10))


def test_fixed_ids():
    assert GeneratorSpec("klee-minty", d=4).instance_id() == "klee-minty:d=4,base=5"
    assert regenerate("klee-minty:d=4,base=5") == klee_minty(4)
    assert regenerate("beale") == beale()


@pytest.mark.parametrize(
    "kwargs",
    [dict(kind="nope"), dict(kind="random", d=0), dict(kind="random", density=0), dict(kind="random", m=0)],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        GeneratorSpec(**kwargs)


def test_unresolved_random_id():
    with pytest.raises(ValueError):
        GeneratorSpec("random").instance_id()
    with pytest.raises(ValueError):
        GeneratorSpec.from_id("random:bogus=1")
    with pytest.raises(ValueError):
        list(corpus([GeneratorSpec("paper")], 0))
