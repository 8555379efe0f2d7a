"""Type realization and the saturation inequality.

For a type ``p = (A'_1, ..., A'_m)`` in one free variable the engine works
with the conjunction chain ``A_k = A'_1 & ... & A'_k``.  The left side of the
saturation inequality is the meet of ``[[exists x A_k]]``; the right side at a
candidate ``u`` is the meet of ``[[A_k(u)]]``.  The left side always contains
the right side; ``defect`` is the measure of the difference.

:func:`realize_open_type` picks a witness ``alpha_k`` per prefix, follows the
chain sets ``U_k = [[A_k(alpha_k)]]`` and selects the stage ``s`` as the
longest prefix on which the finite stage conditions hold:

* nesting: ``U_k`` lies inside the earlier (running-intersected) sets up to ``eps``;
* drop: ``mu(U_j) - mu(U_i) < 1/j + eps`` for ``j <= i``;
* level: with a filtration, every ``alpha_j`` (``j <= i``) lies in level ``min(i, L)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .errors import FormulaClassError, NotOpenError
from .evaluator import Evaluator
from .family import Family, RandomVariable, apply_term, filtration_level, term_closure
from .logic import (
    App,
    Exists,
    Formula,
    Var,
    classify_formula,
    conj,
    free_variables,
    is_open,
    substitute,
)
from .parser import parse_formula, render_formula
from .space import Event, as_fraction, le_mod_eps
from .witnessing import (
    WitnessResult,
    pairing_reduce,
    reduced_variable,
    witness_existential,
)


@dataclass
class TypeSpec:
    """Ordered formulas in the single free variable ``var``."""

    formulas: tuple
    var: str = "x"

    def __post_init__(self):
        self.formulas = tuple(self.formulas)
        if not self.formulas:
            raise ValueError("a type needs at least one formula")
        for f in self.formulas:
            extra = free_variables(f) - {self.var}
            if extra:
                raise ValueError(
                    f"type formula {render_formula(f)!r} has free variables other than {self.var}: "
                    + ", ".join(sorted(extra))
                )

    @property
    def kind(self) -> str:
        classes = {classify_formula(f) for f in self.formulas}
        if classes == {"open"}:
            return "open"
        if classes <= {"open", "existential"}:
            return "existential"
        if classes <= {"open", "universal"}:
            return "universal"
        return "mixed"

    @classmethod
    def parse(cls, text: str, constants: Iterable[str] = (), var: str = "x") -> "TypeSpec":
        """One formula per line; ``#`` starts a comment."""
        constants = list(constants)
        formulas = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                formulas.append(parse_formula(line, constants))
        return cls(tuple(formulas), var)

    def __len__(self) -> int:
        return len(self.formulas)


def conjunction_chain(p: TypeSpec | Sequence[Formula]) -> list[Formula]:
    formulas = p.formulas if isinstance(p, TypeSpec) else tuple(p)
    if not formulas:
        raise ValueError("empty type")
    return [conj(formulas[:k]) for k in range(1, len(formulas) + 1)]


@dataclass
class StageCheck:
    k: int
    nested: bool
    violation: Fraction
    drop_ok: bool
    level_ok: bool | None
    level: int | None

    def failed(self) -> list[str]:
        out = []
        if not self.nested:
            out.append("nesting")
        if not self.drop_ok:
            out.append("drop")
        if self.level_ok is False:
            out.append("level")
        return out

    @property
    def ok(self) -> bool:
        return not self.failed()

    @property
    def flags(self) -> str:
        return ";".join(self.failed()) or "ok"


@dataclass
class ProfileRow:
    k: int
    lhs: Fraction
    rhs: Fraction
    flags: str = "ok"

    @property
    def gap(self) -> Fraction:
        return self.lhs - self.rhs


@dataclass
class SaturationReport:
    kind: str
    var: str
    type_formulas: list
    chain: list
    eps: Fraction
    policy: str | None
    witness: RandomVariable
    stage: int
    profile: list[ProfileRow]
    lhs: Event
    rhs: Event
    defect: Fraction
    full_lhs: Event
    full_rhs: Event
    full_defect: Fraction
    witnesses: list[WitnessResult] = field(default_factory=list)
    chain_sets: list[Event] = field(default_factory=list)
    monotone_sets: list[Event] = field(default_factory=list)
    checks: list[StageCheck] = field(default_factory=list)
    kept: list[int] | None = None
    stage_bound: bool | None = None
    extra: dict = field(default_factory=dict)

    @property
    def realized(self) -> bool:
        return self.defect <= self.eps

    @property
    def losses(self) -> list[Fraction]:
        return [u.measure() - m.measure() for u, m in zip(self.chain_sets, self.monotone_sets)]


def _meet(events: Sequence[Event], space) -> Event:
    out = space.omega()
    for e in events:
        out = out & e
    return out


def check_satur(p: TypeSpec, u: RandomVariable, fam: Family, eps=0, *,
                evaluator: Evaluator | None = None, workers: int = 1) -> SaturationReport:
    """Both sides of the saturation inequality for ``p`` at the candidate ``u``."""
    ev = evaluator or Evaluator(fam, workers=workers)
    if u.space is not fam.space and u.space != fam.space:
        from .errors import SpaceMismatchError

        raise SpaceMismatchError(f"{u.name} is not on the family's space")
    chain = conjunction_chain(p)
    targets = [ev.event(Exists(p.var, A)) for A in chain]
    values = [ev.event(A, {p.var: u}) for A in chain]
    lhs, rhs = _meet(targets, fam.space), _meet(values, fam.space)
    profile = [ProfileRow(k, t.measure(), v.measure()) for k, (t, v) in enumerate(zip(targets, values), 1)]
    defect = lhs.measure() - rhs.measure()
    return SaturationReport(
        kind="check", var=p.var, type_formulas=list(p.formulas), chain=chain,
        eps=as_fraction(eps), policy=None, witness=u, stage=len(chain), profile=profile,
        lhs=lhs, rhs=rhs, defect=defect, full_lhs=lhs, full_rhs=rhs, full_defect=defect,
    )


def _witness_level(fam: Family, res: WitnessResult) -> int | None:
    lvl = filtration_level(fam, res.witness)
    if lvl is not None or not res.witness.synthesized:
        return lvl
    # a merge of members sits as deep as its shallowest constituent
    levels = []
    for name in res.members_used:
        levels.append(filtration_level(fam, fam.lookup(name)))
    if not levels or any(v is None for v in levels):
        return None
    return min(levels)


def _stage_checks(seq: list[int], chain_sets, witness_levels, n_levels, eps, space):
    """Stage conditions along ``seq`` (1-based chain indices)."""
    checks, monotone = [], []
    prev = space.omega()
    measures = []
    for pos, k in enumerate(seq, 1):
        u = chain_sets[k - 1]
        violation = (u - prev).measure()
        nested = le_mod_eps(u, prev, eps)
        prev = prev & u
        monotone.append(prev)
        measures.append(prev.measure())
        mu_i = measures[-1]
        drop_ok = all(measures[j - 1] - mu_i < Fraction(1, j) + eps for j in range(1, pos + 1))
        if n_levels:
            need = min(pos, n_levels)
            level_ok = all(
                witness_levels[seq[j] - 1] is not None and witness_levels[seq[j] - 1] >= need
                for j in range(pos)
            )
        else:
            level_ok = None
        checks.append(StageCheck(k, nested, violation, drop_ok, level_ok, witness_levels[k - 1]))
    return checks, monotone


def _thin(chain_sets, eps, space) -> list[int]:
    """Greedy subsequence meeting the drop bound; the last index is always kept."""
    running, mus = space.omega(), []
    for u in chain_sets:
        running = running & u
        mus.append(running.measure())
    last = mus[-1]
    kept: list[int] = []
    for k, mu in enumerate(mus, 1):
        if k == len(mus) or mu - last < Fraction(1, len(kept) + 1) + eps:
            kept.append(k)
    return kept


def realize_open_type(p: TypeSpec, fam: Family, eps=0, policy: str = "synthesize", *,
                      thin: bool = False, evaluator: Evaluator | None = None,
                      workers: int = 1) -> SaturationReport:
    """Witness per chain prefix, stage selection, and the saturation report at ``alpha_s``."""
    for f in p.formulas:
        if not is_open(f):
            raise NotOpenError(f"open type expected; {render_formula(f)!r} has quantifiers")
    eps = as_fraction(eps)
    ev = evaluator or Evaluator(fam, workers=workers)
    sp = fam.space
    chain = conjunction_chain(p)
    results = [
        witness_existential(A, p.var, None, fam, policy, evaluator=ev, name=f"alpha_{k}")
        for k, A in enumerate(chain, 1)
    ]
    targets = [r.target for r in results]
    chain_sets = [r.event for r in results]
    n_levels = len(fam.levels) if fam.levels is not None else 0
    levels = [_witness_level(fam, r) if n_levels else None for r in results]

    seq = _thin(chain_sets, eps, sp) if thin else list(range(1, len(chain) + 1))
    checks, monotone_seq = _stage_checks(seq, chain_sets, levels, n_levels, eps, sp)
    s_pos = 0
    for c in checks:
        if not c.ok:
            break
        s_pos += 1
    stage = seq[s_pos - 1] if s_pos else 0
    alpha = results[max(stage, 1) - 1].witness

    values = [ev.event(A, {p.var: alpha}) for A in chain]
    flags = {c.k: c.flags for c in checks}
    profile = [
        ProfileRow(k, t.measure(), v.measure(), flags.get(k, "dropped"))
        for k, (t, v) in enumerate(zip(targets, values), 1)
    ]
    lhs = _meet(targets[:stage], sp)
    rhs = _meet(values[:stage], sp)
    full_lhs, full_rhs = _meet(targets, sp), _meet(values, sp)

    # monotone sets indexed by chain position (running intersection along seq)
    monotone = []
    by_k = dict(zip(seq, monotone_seq))
    running = sp.omega()
    for k in range(1, len(chain) + 1):
        running = by_k.get(k, running)
        monotone.append(running)

    # the stage's witness set lies under every earlier chain value and within eps of the target
    stage_bound = None
    if stage:
        U = monotone[stage - 1]
        stage_bound = all(U <= values[k] for k in range(stage)) and \
            targets[stage - 1].measure() - U.measure() <= eps

    return SaturationReport(
        kind="open", var=p.var, type_formulas=list(p.formulas), chain=chain, eps=eps,
        policy=policy, witness=alpha, stage=stage, profile=profile,
        lhs=lhs, rhs=rhs, defect=lhs.measure() - rhs.measure(),
        full_lhs=full_lhs, full_rhs=full_rhs, full_defect=full_lhs.measure() - full_rhs.measure(),
        witnesses=results, chain_sets=chain_sets, monotone_sets=monotone, checks=checks,
        kept=seq if thin else None, stage_bound=stage_bound,
    )


def realize_existential_type(p: TypeSpec, fam: Family, eps=0, closure_depth: int = 0, *,
                             policy: str = "synthesize", thin: bool = False,
                             functions: Sequence[str] = ("pair", "p1", "p2"), cap: int = 10_000,
                             workers: int = 1) -> SaturationReport:
    """Reduce an existential type to an open one in a paired variable and realize that.

    The open type ``C_k(z)`` is realized over the term closure of ``fam`` to
    ``closure_depth``; the returned witness is ``p1`` of the ``z``-witness.
    ``defect``/``profile`` are for the original type at that witness; the
    reduced run is kept under ``extra["z_level"]``.
    """
    if p.kind not in ("open", "existential"):
        raise FormulaClassError(f"existential type expected, got {p.kind}")
    zvar = reduced_variable(p.formulas, p.var)
    reduced = pairing_reduce(p.formulas, p.var, zvar)
    closed = term_closure(fam, closure_depth, functions=functions, cap=cap) if closure_depth else fam
    ev = Evaluator(closed, workers=workers)
    zrep = realize_open_type(TypeSpec(tuple(reduced), zvar), closed, eps, policy, thin=thin, evaluator=ev)
    zw = zrep.witness
    xw = apply_term(App("p1", (Var(zvar),)), {zvar: zw}, closed, name=f"p1({zw.name})")

    chain = conjunction_chain(p)
    targets = [ev.event(Exists(p.var, A)) for A in chain]
    values = [ev.event(A, {p.var: xw}) for A in chain]
    s = zrep.stage
    sp = fam.space
    flags = {row.k: row.flags for row in zrep.profile}
    profile = [ProfileRow(k, t.measure(), v.measure(), flags.get(k, "ok"))
               for k, (t, v) in enumerate(zip(targets, values), 1)]
    lhs, rhs = _meet(targets[:s], sp), _meet(values[:s], sp)
    full_lhs, full_rhs = _meet(targets, sp), _meet(values, sp)
    return SaturationReport(
        kind="existential", var=p.var, type_formulas=list(p.formulas), chain=chain,
        eps=as_fraction(eps), policy=policy, witness=xw, stage=s, profile=profile,
        lhs=lhs, rhs=rhs, defect=lhs.measure() - rhs.measure(),
        full_lhs=full_lhs, full_rhs=full_rhs, full_defect=full_lhs.measure() - full_rhs.measure(),
        witnesses=zrep.witnesses, chain_sets=zrep.chain_sets, monotone_sets=zrep.monotone_sets,
        checks=zrep.checks, kept=zrep.kept, stage_bound=zrep.stage_bound,
        extra={
            "z_var": zvar,
            "reduced": [render_formula(c) for c in reduced],
            "z_witness": zw,
            "z_level": zrep,
            "z_defect": zrep.defect,
            "closure_size": len(closed.domain),
        },
    )


TERM_FUNCTIONS = ("len", "add", "mul", "pair", "p1", "p2")


def terms_in(var: str, depth: int, functions: Sequence[str] = TERM_FUNCTIONS) -> list:
    """All terms built from ``var`` alone with nesting depth <= ``depth``, deduplicated."""
    from .logic import FUNCTIONS

    terms = [Var(var)]
    seen = set(terms)
    for _ in range(depth):
        base = list(terms)
        for f in functions:
            for args in product(base, repeat=FUNCTIONS[f]):
                t = App(f, tuple(args))
                if t not in seen:
                    seen.add(t)
                    terms.append(t)
    return terms


def term_type(A: Formula, depth: int, *, var: str = "x", yvar: str = "y",
              functions: Sequence[str] = TERM_FUNCTIONS) -> TypeSpec:
    """The open type ``{A(x, t(x))}`` over terms ``t`` in ``x`` of depth <= ``depth``."""
    if not is_open(A):
        raise NotOpenError("term_type needs an open formula")
    if free_variables(A) != {var, yvar}:
        raise FormulaClassError(
            f"term_type needs exactly the free variables {var}, {yvar}; "
            f"got {', '.join(sorted(free_variables(A))) or 'none'}"
        )
    out, seen = [], set()
    for t in terms_in(var, depth, functions):
        f = substitute(A, yvar, t)
        if f not in seen:
            seen.add(f)
            out.append(f)
    return TypeSpec(tuple(out), var)
