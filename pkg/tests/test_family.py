import pytest

from rvforce.circuit import Circuit, parse_circuit
from rvforce.errors import CapExceededError, CircuitError, FiltrationError, NotOpenError
from rvforce.family import (
    Family,
    RandomVariable,
    apply_term,
    case_merge,
    eval_rv,
    filtration_level,
    term_closure,
)
from rvforce.parser import parse_formula, parse_term
from rvforce.space import SampleSpace

SP2 = SampleSpace.exhaustive(2)

XOR = """
inputs 2 outputs 1
g0 = XOR x0 x1
out = g0
"""


def table(name, values, sp=SP2):
    return RandomVariable.from_table(sp, name, values)


def test_identity_decodes_sample():
    sp = SampleSpace(3, [0b101, 0b011])
    assert eval_rv(RandomVariable.identity(sp), 0) == 5


def test_not_gate():
    sp = SampleSpace.exhaustive(1)
    circ = Circuit(1, (("NOT", (0,)),), (1,))
    assert eval_rv(RandomVariable.from_circuit(sp, "f", circ), 0) == 1


def test_xor_circuit_truth_table():
    rv = RandomVariable.from_circuit(SP2, "f", parse_circuit(XOR))
    assert rv.table == (0, 1, 1, 0)
    assert [parse_circuit(XOR).evaluate(p) for p in range(4)] == [0, 1, 1, 0]


def test_circuit_render_round_trip():
    circ = parse_circuit(XOR)
    assert parse_circuit(circ.render()) == circ


def test_circuit_errors():
    with pytest.raises(CircuitError):
        parse_circuit("inputs 2 outputs 1\ng0 = XOR x0 x5\nout = g0\n")
    with pytest.raises(CircuitError):
        parse_circuit("inputs 2 outputs 2\ng0 = XOR x0 x1\nout = g0\n")
    with pytest.raises(CircuitError):
        RandomVariable.from_circuit(SampleSpace.exhaustive(3), "f", parse_circuit(XOR))


def test_multi_output_little_endian():
    circ = parse_circuit("inputs 2 outputs 2\ng0 = AND x0 x1\ng1 = XOR x0 x1\nout = g1 g0\n")
    # x0 + x1 as a two-bit number
    assert RandomVariable.from_circuit(SP2, "s", circ).table == (0, 1, 1, 2)


def test_pruned_keeps_semantics():
    circ = parse_circuit("inputs 2 outputs 1\ng0 = AND x0 x1\ng1 = XOR x0 x1\nout = g1\n")
    small = circ.pruned()
    assert small.size == 1
    assert all(small.evaluate(p) == circ.evaluate(p) for p in range(4))


def test_value_out_of_range():
    with pytest.raises(IndexError):
        RandomVariable.constant(SP2, "c", 1).value(4)


def test_apply_term_pointwise():
    a, b = table("a", [0, 1, 0, 1]), table("b", [1, 1, 0, 0])
    assert apply_term(parse_term("x + y"), {"x": a, "y": b}).table == (1, 2, 0, 1)
    c5 = RandomVariable.constant(SP2, "c5", 5)
    assert apply_term(parse_term("len(x)"), {"x": c5}).table == (3,) * 4
    c1, c2 = RandomVariable.constant(SP2, "c1", 1), RandomVariable.constant(SP2, "c2", 2)
    assert apply_term(parse_term("pair(x, y)"), {"x": c1, "y": c2}).table == (8,) * 4


def test_case_merge_examples():
    a, b = table("a", [0, 1, 0, 1]), table("b", [2, 2, 2, 2])
    assert case_merge(a, b, parse_formula("x = 0")).table == (0, 2, 0, 2)
    assert case_merge(a, a, parse_formula("x = 0")).table == a.table
    assert case_merge(a, b, parse_formula("x != x")).table == b.table


def test_case_merge_requires_open():
    a = table("a", [0, 1, 0, 1])
    with pytest.raises(NotOpenError):
        case_merge(a, a, parse_formula("(exists y)(x = y)"))


def test_family_dedupes_by_table():
    a, a2 = table("a", [0, 1, 0, 1]), table("a2", [0, 1, 0, 1])
    fam = Family(SP2, [a, a2])
    assert len(fam) == 1
    assert fam.lookup("a2") is a
    assert fam.dropped == [("a2", "a")]


def test_term_closure_example():
    c1 = RandomVariable.constant(SP2, "c1", 1)
    fam = term_closure(Family(SP2, [c1]), 1, functions=["add", "len", "pair"])
    values = sorted(m.table[0] for m in fam.members)
    assert values == [1, 2, 4]


def test_term_closure_depth_zero_is_same():
    fam = Family(SP2, [table("a", [0, 1, 0, 1])])
    assert [m.table for m in term_closure(fam, 0).members] == [m.table for m in fam.members]


def test_term_closure_cap():
    fam = Family(SP2, [table("a", [0, 1, 2, 3]), table("b", [3, 2, 1, 0])])
    with pytest.raises(CapExceededError) as info:
        term_closure(fam, 2, cap=10)
    assert len(info.value.partial) > 10


def _filtered():
    a, b, c = table("a", [0, 0, 0, 0]), table("b", [1, 1, 1, 1]), table("c", [2, 2, 2, 2])
    return Family(SP2, [a, b, c], levels=[[a, b, c], [a, b], [a]]), (a, b, c)


def test_filtration_level():
    fam, (a, b, c) = _filtered()
    assert filtration_level(fam, a) == 3
    assert filtration_level(fam, c) == 1
    assert filtration_level(fam, table("d", [9, 9, 9, 9])) is None
    assert [m.name for m in fam.domain] == ["a"]


def test_filtration_nesting_violation():
    a, b = table("a", [0, 0, 0, 0]), table("b", [1, 1, 1, 1])
    with pytest.raises(FiltrationError, match="nesting"):
        Family(SP2, [a, b], levels=[[a], [a, b]])
