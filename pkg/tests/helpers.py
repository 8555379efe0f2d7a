"""Random scenario/formula generators and a brute-force per-sample oracle.

The oracle evaluates a formula classically at one sample at a time, with
quantifiers ranging over the members' values at that sample.  It shares no
code with the evaluator beyond the syntax tree classes.
"""

from __future__ import annotations

import random

from rvforce.family import Family, RandomVariable
from rvforce.logic import And, App, Const, Eq, Exists, Forall, Implies, Le, Not, Num, Or, Var
from rvforce.space import SampleSpace


def slow_unpair(z: int) -> tuple[int, int]:
    w = 0
    while (w + 1) * (w + 2) // 2 <= z:
        w += 1
    y = z - w * (w + 1) // 2
    return w - y, y


def oracle_term(t, i: int, env: dict, consts: dict) -> int:
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return consts[t.name].table[i]
    args = [oracle_term(a, i, env, consts) for a in t.args]
    if t.fn == "add":
        return args[0] + args[1]
    if t.fn == "mul":
        return args[0] * args[1]
    if t.fn == "pair":
        a, b = args
        return (a + b) * (a + b + 1) // 2 + b
    if t.fn == "len":
        return len(bin(args[0])) - 2 if args[0] else 0
    if t.fn == "p1":
        return slow_unpair(args[0])[0]
    return slow_unpair(args[0])[1]


def oracle_holds(f, i: int, env: dict, domain: list, consts: dict) -> bool:
    """Classical truth of ``f`` at sample ``i``; ``env`` maps variables to numbers."""
    if isinstance(f, Eq):
        return oracle_term(f.left, i, env, consts) == oracle_term(f.right, i, env, consts)
    if isinstance(f, Le):
        return oracle_term(f.left, i, env, consts) <= oracle_term(f.right, i, env, consts)
    if isinstance(f, Not):
        return not oracle_holds(f.body, i, env, domain, consts)
    if isinstance(f, And):
        return oracle_holds(f.left, i, env, domain, consts) and oracle_holds(f.right, i, env, domain, consts)
    if isinstance(f, Or):
        return oracle_holds(f.left, i, env, domain, consts) or oracle_holds(f.right, i, env, domain, consts)
    if isinstance(f, Implies):
        return (not oracle_holds(f.left, i, env, domain, consts)) or oracle_holds(f.right, i, env, domain, consts)
    values = [m.table[i] for m in domain]
    if isinstance(f, Exists):
        return any(oracle_holds(f.body, i, {**env, f.var: v}, domain, consts) for v in values)
    if isinstance(f, Forall):
        return all(oracle_holds(f.body, i, {**env, f.var: v}, domain, consts) for v in values)
    raise TypeError(f)


def oracle_indices(f, fam: Family, env_rvs: dict | None = None) -> set[int]:
    """Sample indices where ``f`` holds, bindings given as random variables."""
    env_rvs = env_rvs or {}
    consts = {n: fam.lookup(n) for n in fam.names()}
    out = set()
    for i in range(len(fam.space)):
        env = {k: v.table[i] for k, v in env_rvs.items()}
        if oracle_holds(f, i, env, fam.domain, consts):
            out.add(i)
    return out


# -- generators ---------------------------------------------------------------------


def random_space(rng: random.Random, max_points: int = 16) -> SampleSpace:
    n_bits = rng.randint(1, 4)
    if rng.random() < 0.5 or (1 << n_bits) > max_points:
        count = rng.randint(1, min(max_points, 1 << n_bits))
        return SampleSpace.sampled(n_bits, count, rng.randrange(10**6))
    return SampleSpace.exhaustive(n_bits)


def random_family(rng: random.Random, space: SampleSpace, max_members: int = 6,
                  max_value: int = 5, prefix: str = "m") -> Family:
    k = rng.randint(1, max_members)
    members = [
        RandomVariable.from_table(space, f"{prefix}{j}", [rng.randint(0, max_value) for _ in space.points])
        for j in range(k)
    ]
    return Family(space, members)


FUNS = ("add", "mul", "pair", "len", "p1", "p2")


def random_term(rng: random.Random, variables, consts, depth: int = 2):
    leaves = [Var(v) for v in variables] + [Const(c) for c in consts] + [Num(rng.randint(0, 3))]
    if depth == 0 or rng.random() < 0.45:
        return rng.choice(leaves)
    f = rng.choice(FUNS)
    arity = 1 if f in ("len", "p1", "p2") else 2
    return App(f, tuple(random_term(rng, variables, consts, depth - 1) for _ in range(arity)))


def random_open(rng: random.Random, variables, consts, depth: int = 2, term_depth: int = 1):
    if depth == 0 or rng.random() < 0.35:
        atom = rng.choice((Eq, Le))
        return atom(random_term(rng, variables, consts, term_depth),
                    random_term(rng, variables, consts, term_depth))
    op = rng.choice(("not", "and", "or", "implies"))
    if op == "not":
        return Not(random_open(rng, variables, consts, depth - 1, term_depth))
    cls = {"and": And, "or": Or, "implies": Implies}[op]
    return cls(random_open(rng, variables, consts, depth - 1, term_depth),
               random_open(rng, variables, consts, depth - 1, term_depth))


def random_formula(rng: random.Random, free, consts, qdepth: int = 2, depth: int = 3):
    """Formula with at most ``qdepth`` nested quantifiers; free variables among ``free``."""
    if qdepth > 0 and rng.random() < 0.5:
        var = rng.choice(("u", "v", "w"))
        q = rng.choice((Exists, Forall))
        return q(var, random_formula(rng, tuple(free) + (var,), consts, qdepth - 1, depth))
    if depth == 0 or rng.random() < 0.4:
        return random_open(rng, free, consts, 1)
    op = rng.choice(("not", "and", "or", "implies"))
    if op == "not":
        return Not(random_formula(rng, free, consts, qdepth, depth - 1))
    cls = {"and": And, "or": Or, "implies": Implies}[op]
    return cls(random_formula(rng, free, consts, qdepth, depth - 1),
               random_formula(rng, free, consts, qdepth, depth - 1))


# acceptance lines collected for the terminal summary
ACCEPTANCE: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE.append(line)
    print(line)
