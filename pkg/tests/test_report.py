import io
import json
from fractions import Fraction

import pytest

from rvforce.parser import parse_formula
from rvforce.report import Measure, emit_report, render_report, to_plain
from rvforce.saturation import TypeSpec, check_satur
from rvforce.universal import build_universal_failure, minimal_failure
from rvforce.witnessing import skolem_chain, witness_existential


def _half_defect():
    fam, p = minimal_failure()
    # the same formula twice gives a two-row profile with lhs 1 and rhs 1/2
    return check_satur(TypeSpec(p.formulas * 2), fam.members[0], fam)


def test_measure_rendering():
    m = Measure(Fraction(1, 3))
    assert m.exact() == "1/3" and m.approx == "0.333333"


def test_json_defect_field():
    text = render_report(_half_defect(), "json")
    assert '"defect": {"num":1,"den":2,"approx":0.500000}' in text
    data = json.loads(text)
    assert data["defect"] == {"num": 1, "den": 2, "approx": 0.5}
    assert data["lhs"]["hex"] == "f" and data["rhs"]["card"] == 2


def test_csv_profile_rows():
    lines = render_report(_half_defect(), "csv").splitlines()
    assert lines[0] == "k,lhs_measure,rhs_measure,gap,stage_flags"
    assert lines[2] == "2,1/1,1/2,1/2,ok"


def test_text_includes_merge_trace():
    fam, _ = minimal_failure()
    res = witness_existential(parse_formula("x = 0"), "x", None, fam)
    text = render_report(res, "text")
    assert "merge trace:" in text
    assert "member=b, condition=x = 0" in text


def test_skolem_csv():
    fam, _ = minimal_failure()
    chain = skolem_chain(parse_formula("(exists x)(forall y)(x <= y)"), fam)
    rows = render_report(chain, "csv").splitlines()
    assert rows[0].startswith("stage,quantifier")
    assert len(rows) == 3


def test_universal_failure_csv():
    res = build_universal_failure(64, 3, 128, 1, 2, 3)
    rows = render_report(res, "csv").splitlines()
    assert rows[0] == "k,max_length,level,in_core,length_match,measure,lhs_k"
    assert len(rows) == 4
    assert to_plain(res)["deep_max"].value == 0


def test_output_is_byte_stable():
    a = render_report(_half_defect(), "json")
    b = render_report(_half_defect(), "json")
    assert a == b


def test_emit_writes_sink_and_rejects_unknown():
    sink = io.StringIO()
    text = emit_report(_half_defect(), "text", sink)
    assert sink.getvalue() == text and "defect: 1/2 (0.500000)" in text
    with pytest.raises(ValueError):
        render_report(_half_defect(), "yaml")
