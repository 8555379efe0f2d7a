import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rvforce.errors import EmptyFamilyError, UndeclaredConstantError
from rvforce.evaluator import Evaluator, is_valid, truth_value
from rvforce.family import Family, RandomVariable
from rvforce.logic import Exists, Not, Or
from rvforce.parser import parse_formula
from rvforce.space import SampleSpace

from helpers import oracle_indices, random_family, random_formula, random_space

SP = SampleSpace.exhaustive(2)
ID = RandomVariable.identity(SP)


def const(v):
    return RandomVariable.constant(SP, f"c{v}", v)


def test_exists_zero_is_everything():
    fam = Family(SP, [ID, const(0)])
    assert truth_value(parse_formula("(exists x)(x = 0)"), {}, fam).measure() == 1


def test_forall_bound():
    fam = Family(SP, [ID, const(0), const(2)])
    e = truth_value(parse_formula("(forall y)(y <= 2)"), {}, fam)
    assert sorted(e) == [0, 1, 2]
    assert e.measure() == Fraction(3, 4)


def test_is_valid_with_eps():
    fam = Family(SP, [ID, const(0), const(2)])
    f = parse_formula("(forall y)(y <= 2)")
    assert not is_valid(f, fam, 0)
    assert is_valid(f, fam, Fraction(1, 4))
    assert is_valid(parse_formula("0 = 0"), fam)
    assert is_valid(parse_formula("(forall z)(pair(p1(z), p2(z)) = z)"), fam)


def test_bindings_and_constants():
    fam = Family(SP, [ID], constants=[const(1)])
    e = truth_value(parse_formula("x <= c1", ["c1"]), {"x": ID}, fam)
    assert sorted(e) == [0, 1]
    with pytest.raises(UndeclaredConstantError):
        truth_value(parse_formula("x <= c9", ["c9"]), {"x": ID}, fam)


def test_empty_family_quantifier():
    fam = Family(SP, [])
    with pytest.raises(EmptyFamilyError):
        truth_value(parse_formula("(exists x)(x = 0)"), {}, fam)


def test_core_quantification():
    a, b = const(0), const(3)
    fam = Family(SP, [a, b], levels=[[a, b], [a]])
    f = parse_formula("(exists x)(x = 3)")
    assert truth_value(f, {}, fam).measure() == 0
    fam_all = Family(SP, [a, b], levels=[[a, b], [a]], quantify="all")
    assert truth_value(f, {}, fam_all).measure() == 1


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_matches_oracle(seed):
    rng = random.Random(seed)
    sp = random_space(rng, 16)
    fam = random_family(rng, sp, 5)
    f = random_formula(rng, ("x",), [m.name for m in fam.members], qdepth=2)
    x = rng.choice(fam.members)
    assert set(truth_value(f, {"x": x}, fam)) == oracle_indices(f, fam, {"x": x})


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_excluded_middle(seed):
    rng = random.Random(seed)
    sp = random_space(rng, 16)
    fam = random_family(rng, sp, 4)
    f = random_formula(rng, (), [m.name for m in fam.members], qdepth=2)
    assert truth_value(Or(f, Not(f)), {}, fam).is_full()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_exists_monotone_in_family(seed):
    rng = random.Random(seed)
    sp = random_space(rng, 16)
    fam = random_family(rng, sp, 5)
    sub = Family(sp, fam.members[: max(1, len(fam.members) // 2)])
    body = random_formula(rng, ("x",), [], qdepth=0)
    f = Exists("x", body)
    assert truth_value(f, {}, sub) <= truth_value(f, {}, fam)


def test_workers_agree():
    rng = random.Random(5)
    for _ in range(30):
        sp = random_space(rng, 16)
        fam = random_family(rng, sp, 6)
        f = random_formula(rng, (), [m.name for m in fam.members], qdepth=2)
        assert Evaluator(fam, workers=1).event(f) == Evaluator(fam, workers=8).event(f)


def test_memo_off_agrees():
    rng = random.Random(6)
    for _ in range(30):
        sp = random_space(rng, 16)
        fam = random_family(rng, sp, 4)
        f = random_formula(rng, (), [m.name for m in fam.members], qdepth=2)
        assert Evaluator(fam, memo=False).event(f) == Evaluator(fam).event(f)
