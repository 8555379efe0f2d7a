"""Boolean truth values of formulas as events.

Atoms denote the set of samples where they hold; connectives act as set
operations; ``exists``/``forall`` are the join/meet over the family's domain.
Results are memoized per evaluator on (formula, bindings of its free
variables).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Mapping

from .errors import EmptyFamilyError, SpaceMismatchError, UndeclaredConstantError
from .family import Family, RandomVariable, term_table
from .logic import And, Eq, Exists, Forall, Formula, Implies, Le, Not, Or, free_variables
from .space import Event, SampleSpace, as_fraction


def _no_constants(name: str):
    raise UndeclaredConstantError(f"random variable {name!r} is not declared")


class Evaluator:
    """Reusable evaluation context bound to one family (and its space)."""

    def __init__(self, fam: Family | None = None, *, space: SampleSpace | None = None,
                 resolve=None, workers: int = 1, memo: bool = True):
        if fam is None and space is None:
            raise ValueError("need a family or a sample space")
        if fam is not None and space is not None and fam.space != space:
            raise SpaceMismatchError("family and space disagree")
        self.fam = fam
        self.space = space if space is not None else fam.space
        self.resolve = resolve or (fam.lookup if fam is not None else _no_constants)
        self.workers = max(1, int(workers))
        self._memo: dict | None = {} if memo else None
        self._terms: dict = {}

    def domain(self) -> list[RandomVariable]:
        if self.fam is None:
            raise EmptyFamilyError("quantifier without a family")
        return self.fam.require_domain()

    def event(self, f: Formula, env: Mapping[str, RandomVariable] | None = None) -> Event:
        return self._event(f, env or {}, False)

    def _event(self, f: Formula, env, nested: bool) -> Event:
        if self._memo is None:
            return self._eval(f, env, nested)
        key = (f, tuple((v, env.get(v)) for v in sorted(free_variables(f))))
        hit = self._memo.get(key)
        if hit is None:
            hit = self._eval(f, env, nested)
            self._memo[key] = hit
        return hit

    def _eval(self, f: Formula, env, nested: bool) -> Event:
        sp = self.space
        if isinstance(f, (Eq, Le)):
            left = term_table(f.left, env, self.resolve, sp, self._terms)
            right = term_table(f.right, env, self.resolve, sp, self._terms)
            if isinstance(f, Eq):
                bits = "".join("1" if a == b else "0" for a, b in zip(left, right))
            else:
                bits = "".join("1" if a <= b else "0" for a, b in zip(left, right))
            return Event(sp, int(bits[::-1], 2))
        if isinstance(f, Not):
            return ~self._event(f.body, env, nested)
        if isinstance(f, And):
            left = self._event(f.left, env, nested)
            if left.mask == 0:
                return left
            return left & self._event(f.right, env, nested)
        if isinstance(f, Or):
            left = self._event(f.left, env, nested)
            if left.is_full():
                return left
            return left | self._event(f.right, env, nested)
        if isinstance(f, Implies):
            left = self._event(f.left, env, nested)
            if left.mask == 0:
                return ~left
            return ~left | self._event(f.right, env, nested)
        if isinstance(f, (Exists, Forall)):
            return self._quantify(f, env, nested, exists=isinstance(f, Exists))
        raise TypeError(f"not a formula: {f!r}")

    def member_events(self, body: Formula, var: str, env, members=None, *,
                      nested: bool = False) -> list[Event]:
        """``[[body(m)]]`` for each member ``m`` (domain order unless given).

        At top level with ``workers > 1`` members are evaluated on a thread
        pool; results come back in member order either way.
        """
        members = self.domain() if members is None else members
        if self.workers > 1 and not nested and len(members) > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                return list(pool.map(lambda m: self._event(body, {**env, var: m}, True), members))
        return [self._event(body, {**env, var: m}, True) for m in members]

    def _quantify(self, f, env, nested: bool, *, exists: bool) -> Event:
        members = self.domain()
        sp = self.space
        full = sp.full_mask
        mask = 0 if exists else full
        if self.workers > 1 and not nested:
            for ev in self.member_events(f.body, f.var, env, members):
                mask = mask | ev.mask if exists else mask & ev.mask
            return Event(sp, mask)
        for m in members:
            ev = self._event(f.body, {**env, f.var: m}, True)
            if exists:
                mask |= ev.mask
                if mask == full:
                    break
            else:
                mask &= ev.mask
                if mask == 0:
                    break
        return Event(sp, mask)


def open_event(f: Formula, env: Mapping[str, RandomVariable], resolve, space: SampleSpace) -> Event:
    """Truth value of a quantifier-free formula; no family needed."""
    return Evaluator(space=space, resolve=resolve, memo=False).event(f, env)


def truth_value(f: Formula, env: Mapping[str, RandomVariable] | None, fam: Family,
                space: SampleSpace | None = None, *, workers: int = 1,
                evaluator: Evaluator | None = None) -> Event:
    """The event ``[[f]]`` under ``env`` with quantifiers over ``fam``."""
    ev = evaluator or Evaluator(fam, space=space, workers=workers)
    return ev.event(f, env or {})


def is_valid(f: Formula, fam: Family, eps=0, env: Mapping[str, RandomVariable] | None = None,
             *, workers: int = 1, evaluator: Evaluator | None = None) -> bool:
    """True iff ``[[f]]`` has measure at least ``1 - eps``."""
    e = truth_value(f, env, fam, workers=workers, evaluator=evaluator)
    return e.measure() >= 1 - as_fraction(eps)
