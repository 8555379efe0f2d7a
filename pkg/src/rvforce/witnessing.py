"""Quantifier witnesses by definition by cases, Skolem chains, pairing reduction.

``synthesize`` builds a witness by folding :func:`~rvforce.family.case_merge`
over the domain in declaration order, so it attains the join (or meet)
exactly but may leave the family.  ``family-only`` picks the best member,
ties going to the earliest declared one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import FormulaClassError, NotOpenError, SpaceMismatchError
from .evaluator import Evaluator
from .family import Family, RandomVariable, case_merge
from .logic import (
    App,
    Exists,
    Formula,
    Not,
    Var,
    all_names,
    cantor_pair,
    classify_formula,
    fresh_name,
    is_open,
    split_prefix,
    substitute,
)
from .parser import render_formula
from .space import Event, distance

POLICIES = ("synthesize", "family-only")


@dataclass
class WitnessResult:
    witness: RandomVariable
    event: Event
    target: Event
    gap: Fraction
    in_family: bool
    provenance: list = field(default_factory=list)
    policy: str = "synthesize"
    closure_assumed: bool = False

    @property
    def members_used(self) -> list[str]:
        return [step["member"] for step in self.provenance if "member" in step]


def _check_policy(policy: str) -> None:
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")


def _ev(fam: Family, evaluator: Evaluator | None) -> Evaluator:
    if evaluator is None:
        return Evaluator(fam)
    if evaluator.fam is not fam:
        raise ValueError("evaluator is bound to a different family")
    return evaluator


def _result(fam, witness, event, target, trace, policy) -> WitnessResult:
    in_family = fam.member_for(witness) is not None
    return WitnessResult(
        witness=witness,
        event=event,
        target=target,
        gap=distance(target, event),
        in_family=in_family,
        provenance=trace,
        policy=policy,
        closure_assumed=bool(fam.autoclose and not in_family),
    )


def _fold(A: Formula, var: str, env, fam: Family, ev: Evaluator, *, dual: bool, policy: str,
          name: str | None) -> WitnessResult:
    if not is_open(A):
        raise NotOpenError(f"witnessing needs an open formula, got: {render_formula(A)}")
    _check_policy(policy)
    env = dict(env or {})
    members = fam.require_domain()
    events = ev.member_events(A, var, env, members)
    sp = fam.space
    target = sp.omega() if dual else sp.empty()
    for e in events:
        target = target & e if dual else target | e
    if policy == "family-only":
        if dual:
            best = min(range(len(members)), key=lambda i: (events[i].measure(), i))
        else:
            best = max(range(len(members)), key=lambda i: (events[i].measure(), -i))
        w = members[best]
        trace = [{"member": w.name, "measure": events[best].measure()}]
        return _result(fam, w, events[best], target, trace, policy)
    cond = Not(A) if dual else A
    gamma = members[0]
    running = events[0]
    trace = [{"member": gamma.name}]
    for m, e in zip(members[1:], events[1:]):
        if (running.mask == 0) if dual else running.is_full():
            break
        gamma = case_merge(gamma, m, cond, var=var, env=env, fam=fam)
        running = running & e if dual else running | e
        trace.append({"member": m.name, "condition": render_formula(cond)})
    if name:
        gamma = gamma.renamed(name)
    event = ev.event(A, {**env, var: gamma})
    return _result(fam, gamma, event, target, trace, policy)


def witness_existential(A: Formula, var: str = "x", env: Mapping[str, RandomVariable] | None = None,
                        fam: Family | None = None, policy: str = "synthesize", *,
                        evaluator: Evaluator | None = None, name: str | None = None) -> WitnessResult:
    """Witness for ``exists var A`` with ``A`` open; target is ``[[exists var A]]``."""
    return _fold(A, var, env, fam, _ev(fam, evaluator), dual=False, policy=policy, name=name)


def cowitness_universal(C: Formula, var: str = "y", env: Mapping[str, RandomVariable] | None = None,
                        fam: Family | None = None, policy: str = "synthesize", *,
                        evaluator: Evaluator | None = None, name: str | None = None) -> WitnessResult:
    """Counter-witness for ``forall var C``: ``[[C(w)]]`` attains the meet."""
    return _fold(C, var, env, fam, _ev(fam, evaluator), dual=True, policy=policy, name=name)


# -- Skolem chains ----------------------------------------------------------------


@dataclass
class SkolemStage:
    quantifier: str
    var: str
    witness: RandomVariable
    event: Event
    distance: Fraction
    in_family: bool
    method: str
    trace: list = field(default_factory=list)


@dataclass
class SkolemChain:
    formula: Formula
    value: Event
    stages: list[SkolemStage]
    policy: str

    @property
    def exact(self) -> bool:
        return all(s.distance == 0 for s in self.stages)

    @property
    def bindings(self) -> dict[str, RandomVariable]:
        return {s.var: s.witness for s in self.stages}


def _table_merge(members, events, *, dual: bool, space, name: str):
    """Per-sample choice among members using their remainder events."""
    table = list(members[0].table)
    running = events[0].mask
    trace = [{"member": members[0].name}]
    for m, e in zip(members[1:], events[1:]):
        if dual:
            flip = running & ~e.mask
            running &= e.mask
        else:
            flip = ~running & e.mask & space.full_mask
            running |= e.mask
        if flip:
            mt = m.table
            i = 0
            while flip:
                if flip & 1:
                    table[i] = mt[i]
                flip >>= 1
                i += 1
            trace.append({"member": m.name})
    return RandomVariable(name, space, "table", table, synthesized=True,
                          provenance={"table-merge": [t["member"] for t in trace]}), trace


def skolem_chain(A: Formula, fam: Family, policy: str = "synthesize", *,
                 evaluator: Evaluator | None = None) -> SkolemChain:
    """Pick witnesses left to right for an ``exists/forall`` alternating prefix.

    Each existential stage maximizes and each universal stage minimizes the
    truth value of the remaining formula.  When the remainder is open the
    synthesized witness is a case-merge fold; otherwise it is a per-sample
    table merge over the members' remainder events (flagged ``not in family``
    unless its table happens to be a member).
    """
    _check_policy(policy)
    cls = classify_formula(A)
    prefix, _ = split_prefix(A)
    if not (cls in ("open", "exists-forall-prefix") or (cls == "existential" and len(prefix) == 1)):
        raise FormulaClassError(f"skolem_chain needs an exists-forall prefix, got {cls}")
    ev = _ev(fam, evaluator)
    value = ev.event(A, {})
    env: dict[str, RandomVariable] = {}
    stages = []
    remainder = A
    for q, var in prefix:
        body = remainder.body
        dual = q == "forall"
        label = f"{'beta' if dual else 'alpha'}[{var}]"
        if is_open(body):
            res = _fold(body, var, env, fam, ev, dual=dual, policy=policy, name=label)
            w, trace = res.witness, res.provenance
            method = "case-merge" if policy == "synthesize" else "member"
        else:
            members = fam.require_domain()
            events = ev.member_events(body, var, env, members)
            if policy == "family-only":
                if dual:
                    i = min(range(len(members)), key=lambda j: (events[j].measure(), j))
                else:
                    i = max(range(len(members)), key=lambda j: (events[j].measure(), -j))
                w, trace, method = members[i], [{"member": members[i].name}], "member"
            else:
                w, trace = _table_merge(members, events, dual=dual, space=fam.space, name=label)
                method = "table-merge"
        env[var] = w
        stage_event = ev.event(body, env)
        stages.append(SkolemStage(q, var, w, stage_event, distance(stage_event, value),
                                  fam.member_for(w) is not None, method, trace))
        remainder = body
    return SkolemChain(A, value, stages, policy)


# -- pairing ------------------------------------------------------------------------


def _p1(t):
    return App("p1", (t,))


def _p2(t):
    return App("p2", (t,))


def _iter_p2(t, k: int):
    for _ in range(k):
        t = _p2(t)
    return t


def decode_terms(w, m: int) -> list:
    """Terms recovering ``y_1..y_m`` from ``w = <y_1, <y_2, ... y_m>>``."""
    if m == 1:
        return [w]
    return [_p1(_iter_p2(w, i)) for i in range(m - 1)] + [_iter_p2(w, m - 1)]


def collapse_existential_block(A: Formula) -> Formula:
    """``exists y1..ym B`` becomes ``exists w B[y_i := decode_i(w)]``."""
    prefix, matrix = split_prefix(A)
    if any(q != "exists" for q, _ in prefix):
        raise FormulaClassError("not an existential formula")
    if len(prefix) <= 1:
        return A
    ys = [v for _, v in prefix]
    w = fresh_name("w", all_names(A))
    out = matrix
    for y, t in zip(ys, decode_terms(Var(w), len(ys))):
        out = substitute(out, y, t)
    return Exists(w, out)


def reduced_variable(p: Sequence[Formula], var: str = "x") -> str:
    used = {var}
    for A in p:
        used |= all_names(A)
    return fresh_name("z", used)


def pairing_reduce(p: Sequence[Formula], var: str = "x", zvar: str | None = None) -> list[Formula]:
    """Open formulas ``C_k(z) := B_k(p1(z), p1(p2^k(z)))`` for ``A_k = exists y B_k``.

    An open ``A_k`` (no quantifier) reduces to ``A_k(p1(z))``.
    """
    zvar = zvar or reduced_variable(p, var)
    z = Var(zvar)
    out = []
    for k, A in enumerate(p, 1):
        cls = classify_formula(A)
        if cls not in ("open", "existential"):
            raise FormulaClassError(f"pairing_reduce needs existential formulas, got {cls}")
        A = collapse_existential_block(A)
        if isinstance(A, Exists):
            y, B = A.var, A.body
            C = substitute(B, var, _p1(z))
            C = substitute(C, y, _p1(_iter_p2(z, k)))
        else:
            C = substitute(A, var, _p1(z))
        out.append(C)
    return out


def pack_tuple_witness(gamma: RandomVariable, betas: Sequence[RandomVariable], *,
                       name: str | None = None) -> RandomVariable:
    """Pointwise ``<gamma, <beta_1, <beta_2, ... <beta_k, gamma>...>>>``."""
    for b in betas:
        if b.space is not gamma.space and b.space != gamma.space:
            raise SpaceMismatchError("all random variables must share a space")
    acc = gamma.table
    for b in reversed(betas):
        acc = tuple(cantor_pair(u, v) for u, v in zip(b.table, acc))
    acc = tuple(cantor_pair(u, v) for u, v in zip(gamma.table, acc))
    label = name or f"pack({gamma.name};{','.join(b.name for b in betas)})"
    return RandomVariable(label, gamma.space, "table", acc, synthesized=True,
                          provenance={"pack": [gamma.name] + [b.name for b in betas]})
