"""Report rendering as text, JSON or CSV.

Every report is first flattened to plain data by :func:`to_plain`.  Measures
become ``{"num", "den", "approx"}`` with a fixed six-place decimal, events
become ``{"hex", "card", "measure"}``.  Key order is fixed by construction so
output is byte-stable across runs and worker counts.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import fields, is_dataclass
from fractions import Fraction
from typing import Any, TextIO

from .family import RandomVariable
from .logic import ATOMS, BINARY, QUANTIFIERS, Not
from .parser import render_formula
from .saturation import SaturationReport, StageCheck
from .space import Event
from .universal import UniversalFailure, describe
from .witnessing import SkolemChain, SkolemStage, WitnessResult

FORMATS = ("text", "json", "csv")
TABLE_LIMIT = 64
FORMULA_TYPES = (*ATOMS, *BINARY, *QUANTIFIERS, Not)


class Measure:
    """Exact rational with its fixed-precision rendering."""

    __slots__ = ("value",)

    def __init__(self, value: Fraction):
        self.value = Fraction(value)

    @property
    def approx(self) -> str:
        return f"{float(self.value):.6f}"

    def exact(self) -> str:
        return f"{self.value.numerator}/{self.value.denominator}"

    def __str__(self) -> str:
        return f"{self.exact()} ({self.approx})"


def _event(e: Event) -> dict:
    return {"hex": e.hex(), "card": e.card, "measure": Measure(e.measure())}


def _rv(rv: RandomVariable, fam=None) -> dict:
    out = {"name": rv.name, "kind": rv.kind, "synthesized": rv.synthesized}
    if fam is not None:
        out["in_family"] = fam.member_for(rv) is not None
    out["table"] = list(rv.table) if len(rv.table) <= TABLE_LIMIT else None
    return out


def _witness(res: WitnessResult) -> dict:
    return {
        "witness": _rv(res.witness),
        "in_family": res.in_family,
        "policy": res.policy,
        "closure_assumed": res.closure_assumed,
        "event": res.event,
        "target": res.target,
        "gap": res.gap,
        "merge_trace": res.provenance,
    }


def _stage(st: SkolemStage) -> dict:
    return {
        "quantifier": st.quantifier,
        "var": st.var,
        "witness": _rv(st.witness),
        "in_family": st.in_family,
        "method": st.method,
        "event": st.event,
        "distance": st.distance,
        "merge_trace": st.trace,
    }


def _check(c: StageCheck) -> dict:
    return {"k": c.k, "nested": c.nested, "violation": c.violation, "drop_ok": c.drop_ok,
            "level_ok": c.level_ok, "level": c.level, "flags": c.flags}


def _saturation(r: SaturationReport) -> dict:
    out = {
        "kind": r.kind,
        "var": r.var,
        "type": [render_formula(f) for f in r.type_formulas],
        "eps": r.eps,
        "policy": r.policy,
        "stage": r.stage,
        "witness": _rv(r.witness),
        "lhs": r.lhs,
        "rhs": r.rhs,
        "defect": r.defect,
        "realized": r.realized,
        "full_lhs": r.full_lhs,
        "full_rhs": r.full_rhs,
        "full_defect": r.full_defect,
        "stage_bound": r.stage_bound,
        "profile": [{"k": p.k, "lhs": p.lhs, "rhs": p.rhs, "gap": p.gap, "flags": p.flags}
                    for p in r.profile],
    }
    if r.witnesses:
        out["witnesses"] = [
            {"k": k, "name": w.witness.name, "in_family": w.in_family, "gap": w.gap,
             "chain_set": u, "loss": loss}
            for k, (w, u, loss) in enumerate(zip(r.witnesses, r.chain_sets, r.losses), 1)
        ]
        out["checks"] = [_check(c) for c in r.checks]
        out["kept"] = r.kept
    if r.extra:
        extra = dict(r.extra)
        if "z_level" in extra:
            extra["z_level"] = _saturation(extra["z_level"])
        if "z_witness" in extra:
            extra["z_witness"] = _rv(extra["z_witness"])
        out["reduction"] = extra
    return out


def _skolem(ch: SkolemChain) -> dict:
    return {
        "formula": render_formula(ch.formula),
        "policy": ch.policy,
        "value": ch.value,
        "exact": ch.exact,
        "stages": [_stage(s) for s in ch.stages],
    }


def to_plain(obj: Any) -> Any:
    """Recursively convert report objects to dicts, lists, scalars and :class:`Measure`."""
    if isinstance(obj, SaturationReport):
        obj = _saturation(obj)
    elif isinstance(obj, WitnessResult):
        obj = _witness(obj)
    elif isinstance(obj, SkolemChain):
        obj = _skolem(obj)
    elif isinstance(obj, UniversalFailure):
        obj = describe(obj)
    elif isinstance(obj, Event):
        obj = _event(obj)
    elif isinstance(obj, RandomVariable):
        obj = _rv(obj)
    elif isinstance(obj, FORMULA_TYPES):
        return render_formula(obj)
    elif is_dataclass(obj) and not isinstance(obj, type):
        obj = {f.name: getattr(obj, f.name) for f in fields(obj)}
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, Measure)):
        return obj
    if isinstance(obj, Fraction):
        return Measure(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    return str(obj)


# -- json ---------------------------------------------------------------------------


def _json(value, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, Measure):
        v = value.value
        return f'{{"num":{v.numerator},"den":{v.denominator},"approx":{value.approx}}}'
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_json(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(isinstance(v, (int, str)) or v is None for v in value):
            return "[" + ", ".join(json.dumps(v) for v in value) + "]"
        items = [pad + _json(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return json.dumps(value)


def to_json(report, indent: int = 2) -> str:
    return _json(to_plain(report), indent, 0) + "\n"


# -- csv ----------------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, Measure):
        return v.exact()
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, dict) and "measure" in v:
        return v["measure"].exact()
    return str(v)


def to_csv(report) -> str:
    """Row table of the report: the profile, Skolem stages, or the squeeze table."""
    plain = to_plain(report)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "profile" in plain:
        w.writerow(["k", "lhs_measure", "rhs_measure", "gap", "stage_flags"])
        for row in plain["profile"]:
            w.writerow([row["k"], _cell(row["lhs"]), _cell(row["rhs"]), _cell(row["gap"]), row["flags"]])
    elif "stages" in plain:
        w.writerow(["stage", "quantifier", "var", "witness", "in_family", "method", "measure", "distance"])
        for i, st in enumerate(plain["stages"], 1):
            w.writerow([i, st["quantifier"], st["var"], st["witness"]["name"], _cell(st["in_family"]),
                        st["method"], _cell(st["event"]), _cell(st["distance"])])
    elif "squeeze" in plain:
        w.writerow(["k", "max_length", "level", "in_core", "length_match", "measure", "lhs_k"])
        lhs = {row["k"]: row["measure"] for row in plain["lhs_by_k"]}
        for row in plain["squeeze"]:
            w.writerow([row["k"], row["max_length"], row["level"], _cell(row["in_core"]),
                        _cell(row["length_match"]), _cell(row["measure"]), _cell(lhs.get(row["k"]))])
    else:
        scalars = {k: v for k, v in plain.items() if not isinstance(v, (dict, list)) or
                   (isinstance(v, dict) and "measure" in v)}
        w.writerow(list(scalars))
        w.writerow([_cell(v) for v in scalars.values()])
    return buf.getvalue()


# -- text ---------------------------------------------------------------------------


def _text_lines(value, indent: int, out: list[str], key: str | None = None) -> None:
    pad = "  " * indent
    label = "" if key is None else f"{key.replace('_', ' ')}:"
    if isinstance(value, dict):
        if "hex" in value and "measure" in value:
            out.append(f"{pad}{label} {value['measure']} card={value['card']} hex={value['hex']}".rstrip())
            return
        if key is not None:
            out.append(pad + label)
            indent += 1
        for k, v in value.items():
            _text_lines(v, indent, out, k)
        return
    if isinstance(value, list):
        if all(isinstance(v, (int, str)) or v is None for v in value):
            out.append(f"{pad}{label} {', '.join('-' if v is None else str(v) for v in value)}")
            return
        out.append(pad + label)
        for i, v in enumerate(value, 1):
            if isinstance(v, dict):
                head = ", ".join(f"{k}={_scalar_text(x)}" for k, x in v.items()
                                 if not isinstance(x, (dict, list)) or _is_event(x))
                out.append(f"{pad}  [{i}] {head}")
                for k, x in v.items():
                    if isinstance(x, (dict, list)) and not _is_event(x):
                        _text_lines(x, indent + 2, out, k)
            else:
                out.append(f"{pad}  [{i}] {_scalar_text(v)}")
        return
    out.append(f"{pad}{label} {_scalar_text(value)}")


def _is_event(x) -> bool:
    return isinstance(x, dict) and "hex" in x and "measure" in x


def _scalar_text(v) -> str:
    if _is_event(v):
        return str(v["measure"])
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    return str(v)


def to_text(report) -> str:
    out: list[str] = []
    _text_lines(to_plain(report), 0, out)
    return "\n".join(out) + "\n"


def render_report(report, fmt: str = "text") -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"unknown report format {fmt!r}; choose from {', '.join(FORMATS)}")


def emit_report(report, fmt: str = "text", sink: TextIO | None = None) -> str:
    """Render ``report`` and write it to ``sink`` (if given); returns the text."""
    text = render_report(report, fmt)
    if sink is not None:
        sink.write(text)
        sink.flush()
    return text
