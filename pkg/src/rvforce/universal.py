"""Scenarios where a universal type has no realizing witness.

:func:`minimal_failure` is the four-sample instance.  :func:`build_universal_failure`
is the length-budget construction: a filtration whose level ``l`` holds random
variables of output bit-length at most ``B_l = 2**floor(n**(1/l))``, and the type

    A_k(x) := len(x)^k <= nlen  &  (forall y)(len(y) != x)

Every short prefix is realized by some constant that is too long to be the
length of anything in the core, while deeper prefixes force ``x`` down into the
range that the core's lengths cover.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BoundsError
from .evaluator import Evaluator
from .family import Family, RandomVariable, filtration_level
from .logic import Exists
from .parser import parse_formula, render_formula
from .saturation import TypeSpec, conjunction_chain
from .space import Event, SampleSpace


def minimal_failure() -> tuple[Family, TypeSpec]:
    """Four samples, members ``(0,1,0,1)`` and ``(1,0,1,0)``, type ``{forall y (x <= y)}``."""
    sp = SampleSpace.exhaustive(2)
    fam = Family(sp, [
        RandomVariable.from_table(sp, "a", [0, 1, 0, 1]),
        RandomVariable.from_table(sp, "b", [1, 0, 1, 0]),
    ])
    return fam, TypeSpec((parse_formula("(forall y)(x <= y)"),))


def budget_exponent(n: int, level: int) -> int:
    """``floor(n ** (1/level))`` computed exactly."""
    r = round(n ** (1 / level))
    while r ** level > n:
        r -= 1
    while (r + 1) ** level <= n:
        r += 1
    return r


def length_formula(k: int) -> str:
    power = "*".join(["len(x)"] * k)
    return f"({power} <= nlen) & (forall y)(len(y) != x)"


def lenwit(rv: RandomVariable, name: str | None = None) -> RandomVariable:
    """Pointwise ``2**rv - 1``: a value whose bit-length is ``rv``."""
    return RandomVariable.from_table(rv.space, name or f"lenwit({rv.name})",
                                     [(1 << v) - 1 for v in rv.table], synthesized=True)


@dataclass
class SqueezeRow:
    k: int
    max_length: int
    level: int
    in_core: bool
    length_match: Fraction
    measure: Fraction


@dataclass
class UniversalFailure:
    n: int
    levels: int
    samples: int
    seed: int
    horizon: int
    depth: int
    budgets: list[int]
    family: Family
    type: TypeSpec
    catalog: list[tuple[str, int, int]]
    lhs_by_k: list[Fraction]
    lhs: Event
    deep: list[tuple[str, Fraction]]
    squeeze: list[SqueezeRow] = field(default_factory=list)

    @property
    def lhs_measure(self) -> Fraction:
        return self.lhs.measure()

    @property
    def deep_max(self) -> Fraction:
        return max(m for _, m in self.deep)

    @property
    def deep_argmax(self) -> str:
        best = self.deep_max
        return next(name for name, m in self.deep if m == best)


def _level_for(bits: int, budgets: list[int]) -> int:
    """Deepest level whose bit-length budget admits ``bits`` (0 if none)."""
    level = 0
    for k, b in enumerate(budgets, 1):
        if bits <= b:
            level = k
    return level


def build_universal_failure(n: int = 256, levels: int = 4, samples: int = 1024, seed: int = 7,
                            horizon: int = 3, depth: int = 4, *, workers: int = 1) -> UniversalFailure:
    if n < 16:
        raise BoundsError("n must be at least 16")
    if levels < 2:
        raise BoundsError("need at least 2 levels")
    if samples < 64:
        raise BoundsError("need at least 64 samples")
    if not 1 <= horizon < depth:
        raise BoundsError("need 1 <= horizon < depth")

    sp = SampleSpace.sampled(n, samples, seed)
    # budget for level l is 2**r_l; only the exponent is stored
    exps = [budget_exponent(n, l) for l in range(1, levels + 1)]
    budgets = [1 << e for e in exps]

    lengths = set(range(budgets[-1] + 1))
    lengths |= {budget_exponent(n, k) for k in range(1, depth + 1)}
    lengths |= {b for b in budgets[1:]}
    members: list[RandomVariable] = []
    for b in sorted(lengths):
        members.append(RandomVariable.constant(sp, f"c{b}", 0 if b == 0 else 1 << (b - 1)))
    rng = random.Random(seed + 1)
    small_cap = budgets[-1]
    for i in range(3):
        members.append(RandomVariable.from_table(
            sp, f"r{i}", [rng.randrange(small_cap + 1) for _ in range(samples)]))
    small = [m for m in members if m.max_value <= small_cap]
    members += [lenwit(m) for m in small]
    ident = RandomVariable.identity(sp, "id")
    members.append(ident)

    def bits(rv):
        return max(v.bit_length() for v in rv.table)

    level_of = {}
    for m in members:
        level_of[m.name] = 1 if m is ident else max(1, _level_for(bits(m), budgets))
    level_lists = [[m for m in members if level_of[m.name] >= k] for k in range(1, levels + 1)]
    nlen = RandomVariable.constant(sp, "nlen", n)
    fam = Family(sp, members, levels=level_lists, constants=[nlen])
    catalog = [(m.name, filtration_level(fam, m), bits(m)) for m in fam.members]

    p = TypeSpec(tuple(parse_formula(length_formula(k), ["nlen"]) for k in range(1, depth + 1)))
    chain = conjunction_chain(p)
    ev = Evaluator(fam, workers=workers)
    exists = [ev.event(Exists("x", A)) for A in chain[:horizon]]
    lhs = sp.omega()
    lhs_by_k = []
    for e in exists:
        lhs = lhs & e
        lhs_by_k.append(e.measure())

    deep_formula = chain[depth - 1]
    deep = [(a.name, ev.event(deep_formula, {"x": a}).measure()) for a in fam.core]

    squeeze = []
    length_match = parse_formula("(exists y)(len(y) = x)")
    for k in range(1, depth + 1):
        m_k = budget_exponent(n, k)
        v = RandomVariable.constant(sp, f"v{k}", 1 << (m_k - 1))
        lvl = _level_for(m_k, budgets)
        squeeze.append(SqueezeRow(
            k=k, max_length=m_k, level=lvl, in_core=fam.in_domain(v),
            length_match=ev.event(length_match, {"x": v}).measure(),
            measure=ev.event(chain[k - 1], {"x": v}).measure(),
        ))
    return UniversalFailure(n, levels, samples, seed, horizon, depth, budgets, fam, p, catalog,
                            lhs_by_k, lhs, deep, squeeze)


def describe(result: UniversalFailure) -> dict:
    """Plain dictionary view for report emission."""
    return {
        "n": result.n,
        "levels": result.levels,
        "samples": result.samples,
        "seed": result.seed,
        "horizon": result.horizon,
        "depth": result.depth,
        "budget_exponents": [b.bit_length() - 1 for b in result.budgets],
        "formulas": [render_formula(f) for f in result.type.formulas],
        "catalog": [{"name": n, "level": l, "bits": b} for n, l, b in result.catalog],
        "lhs_by_k": [{"k": k, "measure": m} for k, m in enumerate(result.lhs_by_k, 1)],
        "lhs": result.lhs,
        "deep": [{"name": n, "measure": m} for n, m in result.deep],
        "deep_max": result.deep_max,
        "deep_argmax": result.deep_argmax,
        "squeeze": [vars(r) for r in result.squeeze],
    }
