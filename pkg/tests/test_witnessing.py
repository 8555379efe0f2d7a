import random
from fractions import Fraction

import pytest

from rvforce.errors import FormulaClassError, NotOpenError
from rvforce.evaluator import truth_value
from rvforce.family import Family, RandomVariable
from rvforce.logic import Exists, Forall
from rvforce.parser import parse_formula, render_formula
from rvforce.space import SampleSpace
from rvforce.witnessing import (
    collapse_existential_block,
    cowitness_universal,
    pack_tuple_witness,
    pairing_reduce,
    skolem_chain,
    witness_existential,
)

from helpers import random_family, random_open, random_space

SP = SampleSpace.exhaustive(2)
A = RandomVariable.from_table(SP, "a", [0, 1, 0, 1])
B = RandomVariable.from_table(SP, "b", [1, 0, 1, 0])
FAM = Family(SP, [A, B])


def test_witness_synthesized_example():
    res = witness_existential(parse_formula("x = 0"), "x", None, FAM)
    assert res.witness.table == (0, 0, 0, 0)
    assert res.event.is_full() and res.gap == 0
    assert not res.in_family
    assert res.members_used == ["a", "b"]


def test_witness_singleton_and_unsatisfiable():
    fam = Family(SP, [A])
    res = witness_existential(parse_formula("x = 1"), "x", None, fam)
    assert res.witness.table == A.table and res.gap == 0
    res = witness_existential(parse_formula("x != x"), "x", None, FAM)
    assert res.event.mask == 0 and res.target.mask == 0 and res.gap == 0


def test_witness_family_only():
    res = witness_existential(parse_formula("x = 0"), "x", None, FAM, "family-only")
    assert res.witness is A and res.in_family
    assert res.gap == Fraction(1, 2)


def test_witness_needs_open():
    with pytest.raises(NotOpenError):
        witness_existential(parse_formula("(exists y)(x = y)"), "x", None, FAM)


def test_cowitness_examples():
    res = cowitness_universal(parse_formula("y = 0"), "y", None, FAM)
    assert res.event.mask == 0 and res.target.mask == 0
    for policy in ("synthesize", "family-only"):
        res = cowitness_universal(parse_formula("y = y"), "y", None, FAM, policy)
        assert res.event.is_full()
    assert cowitness_universal(parse_formula("y = 1"), "y", None, Family(SP, [B])).witness.table == B.table


def test_cowitness_exact_random():
    rng = random.Random(9)
    for _ in range(100):
        sp = random_space(rng, 32)
        fam = random_family(rng, sp, 6)
        C = random_open(rng, ("y",), (), depth=3)
        res = cowitness_universal(C, "y", None, fam)
        assert res.gap == 0
        assert res.event == truth_value(Forall("y", C), {}, fam)


def test_witness_with_environment():
    c = RandomVariable.constant(SP, "c", 1)
    fam = Family(SP, [A, B, c])
    res = witness_existential(parse_formula("x = z"), "x", {"z": B}, fam)
    assert res.event.is_full() and res.gap == 0


def test_skolem_family_only_example():
    chain = skolem_chain(parse_formula("(exists x)(forall y)(x <= y)"), FAM, "family-only")
    assert chain.stages[0].witness is A
    assert chain.stages[0].event.measure() == Fraction(1, 2)


def test_skolem_synthesize_exact():
    chain = skolem_chain(parse_formula("(exists x)(forall y)(x <= y)"), FAM)
    assert chain.exact
    assert chain.stages[0].witness.table == (0, 0, 0, 0)
    assert chain.value.measure() == 1
    assert [s.method for s in chain.stages] == ["table-merge", "case-merge"]


def test_skolem_open_and_wrong_prefix():
    chain = skolem_chain(parse_formula("0 <= 1"), FAM)
    assert chain.stages == [] and chain.value.is_full()
    with pytest.raises(FormulaClassError):
        skolem_chain(parse_formula("(forall y)(exists x)(x <= y)"), FAM)


def test_pairing_reduce_examples():
    p = [parse_formula("(exists y)(y = x)"), parse_formula("(exists y)(x <= y)"), parse_formula("x = 1")]
    c = pairing_reduce(p)
    assert render_formula(c[0]) == "p1(p2(z)) = p1(z)"
    assert render_formula(c[1]) == "p1(z) <= p1(p2(p2(z)))"
    assert render_formula(c[2]) == "p1(z) = 1"


def test_pairing_reduce_rejects_universal():
    with pytest.raises(FormulaClassError):
        pairing_reduce([parse_formula("(forall y)(y = x)")])


def test_collapse_block():
    f = collapse_existential_block(parse_formula("(exists y1)(exists y2)(y1 + y2 = x)"))
    assert isinstance(f, Exists) and not isinstance(f.body, Exists)
    assert render_formula(f) == "(exists w)(p1(w) + p2(w) = x)"


def test_pack_tuple():
    c1, c2 = RandomVariable.constant(SP, "c1", 1), RandomVariable.constant(SP, "c2", 2)
    # pair(1, pair(2, 1)) = pair(1, 7)
    assert pack_tuple_witness(c1, [c2]).table == (43,) * 4
    assert pack_tuple_witness(c1, []).table == (4,) * 4


def test_pack_decodes_through_reduction():
    c1, c2, c3 = (RandomVariable.constant(SP, f"c{v}", v) for v in (1, 2, 3))
    fam = Family(SP, [c1, c2, c3])
    packed = pack_tuple_witness(c1, [c2, c3])
    p = [parse_formula("(exists y)(y = x + 1)"), parse_formula("(exists y)(y = x + 2)")]
    c = pairing_reduce(p)
    for f in c:
        assert truth_value(f, {"z": packed}, fam).is_full()
