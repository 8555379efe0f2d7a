from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rvforce.errors import SpaceMismatchError
from rvforce.space import (
    Event,
    SampleSpace,
    complement,
    difference,
    distance,
    eq_mod_eps,
    join,
    le_mod_eps,
    measure,
    meet,
)

N = 12
SP = SampleSpace.exhaustive(2)
BIG = SampleSpace.sampled(8, N, seed=3)

masks = st.integers(0, (1 << N) - 1)


def ev(mask):
    return Event(BIG, mask)


def test_counting_examples():
    u, v = SP.event([0]), SP.event([2])
    assert join(u, v) == SP.event([0, 2])
    assert meet(SP.omega(), u) == u
    assert complement(SP.empty()) == SP.omega()
    assert measure(SP.omega()) == 1 and measure(SP.empty()) == 0
    assert measure(SP.event([0, 2])) == Fraction(1, 2)


def test_distance_examples():
    u = SP.event([0])
    assert distance(u, u) == 0
    assert distance(u, ~u) == 1
    assert distance(u, SP.event([0, 1])) == Fraction(1, 4)


def test_le_mod_eps_examples():
    u, v = SP.event([0, 1]), SP.event([1, 2])
    assert le_mod_eps(SP.event([1]), v, 0)
    assert le_mod_eps(u, v, 0.3)
    assert not le_mod_eps(u, v, 0.1)
    assert le_mod_eps(u, v, Fraction(1, 4))


def test_hex_is_lsb_first():
    assert SP.event([0]).hex() == "1"
    assert SP.event([0, 1, 2, 3]).hex() == "f"
    assert SP.event([]).hex() == "0"


def test_space_mismatch():
    with pytest.raises(SpaceMismatchError):
        SP.omega() & SampleSpace.exhaustive(3).omega()


def test_sampled_is_deterministic():
    a = SampleSpace.sampled(256, 1024, 7)
    b = SampleSpace.sampled(256, 1024, 7)
    assert a.points == b.points and len(set(a.points)) == 1024
    assert SampleSpace.sampled(256, 1024, 8).points != a.points


def test_sampled_rejects_impossible_count():
    with pytest.raises(ValueError):
        SampleSpace.sampled(2, 5, 0)


@settings(max_examples=1000)
@given(masks, masks, masks)
def test_boolean_algebra_laws(a, b, c):
    u, v, w = ev(a), ev(b), ev(c)
    assert u & (v | w) == (u & v) | (u & w)
    assert u | (v & w) == (u | v) & (u | w)
    assert ~(u & v) == ~u | ~v
    assert ~(u | v) == ~u & ~v
    assert u | (u & v) == u
    assert u & ~u == BIG.empty() and u | ~u == BIG.omega()
    assert ~~u == u
    assert difference(u, v) == u & ~v


@settings(max_examples=1000)
@given(masks, masks, masks)
def test_metric_axioms(a, b, c):
    u, v, w = ev(a), ev(b), ev(c)
    assert distance(u, v) == distance(v, u) >= 0
    assert (distance(u, v) == 0) == (u == v)
    assert distance(u, w) <= distance(u, v) + distance(v, w)


@given(masks, masks)
def test_measure_additivity(a, b):
    u, v = ev(a), ev(b)
    assert measure(u | v) + measure(u & v) == measure(u) + measure(v)
    assert measure(u - v) + measure(u & v) == measure(u)


@given(masks, masks)
def test_eps_zero_is_inclusion(a, b):
    u, v = ev(a), ev(b)
    assert le_mod_eps(u, v, 0) == (u <= v)
    assert eq_mod_eps(u, v, 0) == (u == v)


@given(masks, masks, st.fractions(0, 1))
def test_eps_monotone(a, b, eps):
    u, v = ev(a), ev(b)
    if le_mod_eps(u, v, eps):
        assert le_mod_eps(u, v, eps + Fraction(1, 10))
