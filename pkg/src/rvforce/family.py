"""Random variables over a sample space, families, filtrations and closure.

A random variable is total on its space and is identified extensionally by
its value table.  A :class:`Family` is the range of the quantifiers; it keeps
members deduplicated by table and may carry a filtration
``level 1 ⊇ level 2 ⊇ ... ⊇ level L`` whose deepest level is the core.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping, Sequence

from .circuit import Circuit
from .errors import (
    CapExceededError,
    CircuitError,
    EmptyFamilyError,
    FiltrationError,
    NotOpenError,
    SpaceMismatchError,
    UnboundVariableError,
    UndeclaredConstantError,
)
from .logic import (
    FUNCTIONS,
    App,
    Const,
    Formula,
    Num,
    Term,
    Var,
    cantor_pair,
    cantor_unpair,
    is_open,
    term_vars,
)
from .space import SampleSpace


class RandomVariable:
    """A total function from sample indices to naturals.

    ``kind`` is one of ``table``, ``circuit``, ``identity``, ``const``.  The
    value table is computed on first access and cached; recomputation is
    idempotent, so concurrent first accesses are harmless.
    """

    __slots__ = ("name", "space", "kind", "source", "synthesized", "provenance", "_table")

    def __init__(self, name: str, space: SampleSpace, kind: str, source=None, *,
                 synthesized: bool = False, provenance=None):
        if kind not in ("table", "circuit", "identity", "const"):
            raise ValueError(f"unknown backing {kind!r}")
        self.name = name
        self.space = space
        self.kind = kind
        self.source = source
        self.synthesized = synthesized
        self.provenance = provenance
        self._table = None
        if kind == "table":
            src = tuple(int(v) for v in source)
            if len(src) != len(space):
                raise ValueError(f"{name}: table has {len(src)} entries, space has {len(space)}")
            if any(v < 0 for v in src):
                raise ValueError(f"{name}: values must be natural numbers")
            self.source = src
            self._table = src
        elif kind == "const":
            if int(source) < 0:
                raise ValueError(f"{name}: values must be natural numbers")
            self.source = int(source)
        elif kind == "circuit":
            if not isinstance(source, Circuit):
                raise CircuitError(f"{name}: circuit backing expected")
            if source.n_inputs != space.n_bits:
                raise CircuitError(
                    f"{name}: circuit has {source.n_inputs} inputs, samples have {space.n_bits} bits"
                )

    # constructors
    @classmethod
    def from_table(cls, space: SampleSpace, name: str, values: Sequence[int], **kw) -> "RandomVariable":
        return cls(name, space, "table", values, **kw)

    @classmethod
    def constant(cls, space: SampleSpace, name: str, value: int, **kw) -> "RandomVariable":
        return cls(name, space, "const", value, **kw)

    @classmethod
    def identity(cls, space: SampleSpace, name: str = "id") -> "RandomVariable":
        return cls(name, space, "identity")

    @classmethod
    def from_circuit(cls, space: SampleSpace, name: str, circuit: Circuit) -> "RandomVariable":
        return cls(name, space, "circuit", circuit)

    @property
    def table(self) -> tuple[int, ...]:
        t = self._table
        if t is None:
            t = self._compute()
            self._table = t
        return t

    def _compute(self) -> tuple[int, ...]:
        sp = self.space
        if self.kind == "identity":
            return sp.points
        if self.kind == "const":
            return (self.source,) * len(sp)
        circ: Circuit = self.source
        full = sp.full_mask
        masks = [
            sp.event_from_bools((p >> i) & 1 for p in sp.points).mask for i in range(circ.n_inputs)
        ]
        out = [0] * len(sp)
        for b, m in enumerate(circ.simulate(masks, full)):
            i = 0
            while m:
                if m & 1:
                    out[i] |= 1 << b
                m >>= 1
                i += 1
        return tuple(out)

    def value(self, index: int) -> int:
        if not 0 <= index < len(self.space):
            raise IndexError(f"sample index {index} out of range [0, {len(self.space)})")
        if self._table is not None:
            return self._table[index]
        if self.kind == "identity":
            return self.space.points[index]
        if self.kind == "const":
            return self.source
        return self.source.evaluate(self.space.points[index])

    @property
    def max_value(self) -> int:
        return max(self.table)

    @property
    def max_output_length(self) -> int:
        return max(v.bit_length() for v in self.table)

    def is_constant(self) -> bool:
        t = self.table
        return all(v == t[0] for v in t)

    def renamed(self, name: str) -> "RandomVariable":
        rv = RandomVariable(name, self.space, self.kind, self.source,
                            synthesized=self.synthesized, provenance=self.provenance)
        rv._table = self._table
        return rv

    def __repr__(self) -> str:
        return f"RandomVariable({self.name!r}, {self.kind})"


def eval_rv(rv: RandomVariable, sample_index: int) -> int:
    return rv.value(sample_index)


def _same_space(space: SampleSpace, rv: RandomVariable) -> None:
    if rv.space is not space and rv.space != space:
        raise SpaceMismatchError(f"{rv.name} lives on a different sample space")


class Family:
    """Quantifier range: ordered members, deduplicated by value table.

    ``levels`` (optional) lists the filtration from level 1 down to the core;
    entries are random variables or member names.  ``constants`` are extra
    named random variables formulas may mention without quantifying over them.
    With ``quantify="core"`` quantifiers range over the deepest level.
    """

    def __init__(self, space: SampleSpace, members: Iterable[RandomVariable] = (), *,
                 levels: Sequence[Iterable] | None = None,
                 constants: Iterable[RandomVariable] = (),
                 quantify: str = "core", autoclose: bool = False):
        if quantify not in ("core", "all"):
            raise ValueError("quantify must be 'core' or 'all'")
        self.space = space
        self.quantify = quantify
        self.autoclose = autoclose
        self._names: dict[str, RandomVariable] = {}
        self._by_table: dict[tuple, RandomVariable] = {}
        self.members: list[RandomVariable] = []
        self.dropped: list[tuple[str, str]] = []
        members = list(members)
        if levels is not None and not members:
            members = [m for m in levels[0] if isinstance(m, RandomVariable)]
        for rv in members:
            self._add(rv)
        for rv in constants:
            _same_space(space, rv)
            self._names.setdefault(rv.name, rv)
        self.levels: list[list[RandomVariable]] | None = None
        if levels is not None:
            self._set_levels(levels)

    def _add(self, rv: RandomVariable) -> bool:
        _same_space(self.space, rv)
        existing = self._by_table.get(rv.table)
        if existing is not None:
            self._names.setdefault(rv.name, existing)
            if rv.name != existing.name:
                self.dropped.append((rv.name, existing.name))
            return False
        self._by_table[rv.table] = rv
        self._names[rv.name] = rv
        self.members.append(rv)
        return True

    def _set_levels(self, levels) -> None:
        resolved = []
        for k, level in enumerate(levels, 1):
            out, seen = [], set()
            for m in level:
                rv = self.lookup(m) if isinstance(m, str) else m
                canon = self._by_table.get(rv.table)
                if canon is None:
                    raise FiltrationError(f"level {k}: {rv.name} is not a family member")
                if canon.table not in seen:
                    seen.add(canon.table)
                    out.append(canon)
            resolved.append(out)
        if not resolved:
            raise FiltrationError("a filtration needs at least one level")
        for k in range(len(resolved) - 1):
            upper = {rv.table for rv in resolved[k]}
            extra = [rv.name for rv in resolved[k + 1] if rv.table not in upper]
            if extra:
                raise FiltrationError(
                    f"nesting violation: level {k + 2} has {', '.join(extra)} not in level {k + 1}"
                )
        if len(resolved[0]) != len(self.members):
            missing = [rv.name for rv in self.members if rv.table not in {r.table for r in resolved[0]}]
            raise FiltrationError(f"level 1 must contain every member; missing {', '.join(missing)}")
        self.levels = resolved

    @property
    def domain(self) -> list[RandomVariable]:
        if self.levels is not None and self.quantify == "core":
            return self.levels[-1]
        return self.members

    @property
    def core(self) -> list[RandomVariable]:
        return self.levels[-1] if self.levels is not None else self.members

    def lookup(self, name: str) -> RandomVariable:
        try:
            return self._names[name]
        except KeyError:
            raise UndeclaredConstantError(f"random variable {name!r} is not declared") from None

    def names(self) -> list[str]:
        return list(self._names)

    def member_for(self, rv: RandomVariable) -> RandomVariable | None:
        """The member with the same value table, if any."""
        return self._by_table.get(rv.table)

    def in_domain(self, rv: RandomVariable) -> bool:
        return any(m.table == rv.table for m in self.domain)

    def require_domain(self) -> list[RandomVariable]:
        d = self.domain
        if not d:
            raise EmptyFamilyError("quantifier over an empty family")
        return d

    def with_members(self, extra: Iterable[RandomVariable]) -> "Family":
        """A new family without filtration: the current domain plus ``extra``."""
        out = Family(self.space, list(self.domain) + list(extra), quantify="all",
                     autoclose=self.autoclose)
        for name, rv in self._names.items():
            out._names.setdefault(name, rv)
        return out

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __repr__(self) -> str:
        lv = f", levels={len(self.levels)}" if self.levels else ""
        return f"Family({len(self.members)} members{lv})"


def filtration_level(fam: Family, rv: RandomVariable) -> int | None:
    """Deepest filtration level containing ``rv`` (by table), or ``None``."""
    if fam.levels is None:
        raise FiltrationError("no filtration declared")
    best = None
    for k, level in enumerate(fam.levels, 1):
        if any(m.table == rv.table for m in level):
            best = k
        else:
            break
    return best


# -- pointwise terms ----------------------------------------------------------------


def _unpair_table(t, which: int):
    return tuple(cantor_unpair(v)[which] for v in t)


def term_table(t: Term, env: Mapping[str, RandomVariable], resolve, space: SampleSpace,
               cache: dict | None = None) -> tuple[int, ...]:
    """Value table of ``t`` with variables bound by ``env`` and constants by ``resolve``."""
    if isinstance(t, Var):
        try:
            rv = env[t.name]
        except KeyError:
            raise UnboundVariableError(f"variable {t.name!r} is unbound") from None
        _same_space(space, rv)
        return rv.table
    if isinstance(t, Num):
        return (t.value,) * len(space)
    if isinstance(t, Const):
        rv = resolve(t.name)
        _same_space(space, rv)
        return rv.table
    if cache is not None:
        key = (t, tuple(id(env[v]) for v in sorted(term_vars(t)) if v in env))
        hit = cache.get(key)
        if hit is not None:
            return hit[0]
    args = [term_table(a, env, resolve, space, cache) for a in t.args]
    f = t.fn
    if f == "add":
        out = tuple(a + b for a, b in zip(*args))
    elif f == "mul":
        out = tuple(a * b for a, b in zip(*args))
    elif f == "pair":
        out = tuple(cantor_pair(a, b) for a, b in zip(*args))
    elif f == "len":
        out = tuple(a.bit_length() for a in args[0])
    elif f == "p1":
        out = _unpair_table(args[0], 0)
    else:
        out = _unpair_table(args[0], 1)
    if cache is not None:
        # keep the bound random variables alive so their ids stay unique
        cache[key] = (out, [env[v] for v in term_vars(t) if v in env])
    return out


def _resolver(fam: Family | None):
    if fam is None:
        def missing(name):
            raise UndeclaredConstantError(f"random variable {name!r} is not declared")
        return missing
    return fam.lookup


def apply_term(term: Term, env: Mapping[str, RandomVariable], fam: Family | None = None,
               *, space: SampleSpace | None = None, name: str | None = None) -> RandomVariable:
    """Pointwise image of ``term``: a new, synthesized table-backed random variable."""
    if space is None:
        if fam is not None:
            space = fam.space
        elif env:
            space = next(iter(env.values())).space
        else:
            raise ValueError("cannot infer the sample space")
    from .parser import render_term

    text = render_term(term)
    table = term_table(term, env, _resolver(fam), space)
    label = name or text
    return RandomVariable(label, space, "table", table, synthesized=True,
                          provenance={"term": text, "env": {k: v.name for k, v in env.items()}})


def case_merge(alpha: RandomVariable, beta: RandomVariable, cond: Formula, *,
               var: str | None = None, env: Mapping[str, RandomVariable] | None = None,
               fam: Family | None = None, name: str | None = None) -> RandomVariable:
    """Definition by cases: ``alpha`` where ``cond(alpha)`` holds, ``beta`` elsewhere."""
    from .evaluator import open_event
    from .logic import free_variables
    from .parser import render_formula

    if not is_open(cond):
        raise NotOpenError("case condition must be an open formula")
    _same_space(alpha.space, beta)
    env = dict(env or {})
    if var is None:
        free = sorted(free_variables(cond) - set(env))
        if len(free) > 1:
            raise UnboundVariableError(f"case condition has several free variables: {', '.join(free)}")
        var = free[0] if free else "x"
    env[var] = alpha
    ev = open_event(cond, env, _resolver(fam), alpha.space)
    m = ev.mask
    ta, tb = alpha.table, beta.table
    table = tuple(a if (m >> i) & 1 else b for i, (a, b) in enumerate(zip(ta, tb)))
    return RandomVariable(name or f"case({alpha.name},{beta.name})", alpha.space, "table", table,
                          synthesized=True,
                          provenance={"case": render_formula(cond), "var": var,
                                      "then": alpha.name, "else": beta.name})


def term_closure(fam: Family, depth: int, *, functions: Sequence[str] | None = None,
                 cap: int = 10_000) -> Family:
    """Add the pointwise images of all terms of depth <= ``depth`` over the domain.

    The result has no filtration; its members are the old domain followed by
    the new images in enumeration order.  Raises :class:`CapExceededError`
    listing the partial family when it would exceed ``cap`` members.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    functions = list(functions or FUNCTIONS)
    for f in functions:
        if f not in FUNCTIONS:
            raise ValueError(f"unknown function {f!r}")
    members = list(fam.domain)
    seen = {rv.table for rv in members}
    if len(members) > cap:
        raise CapExceededError(f"family already has {len(members)} > {cap} members",
                               [m.name for m in members])
    space = fam.space
    for _ in range(depth):
        base = list(members)
        for f in functions:
            for args in product(base, repeat=FUNCTIONS[f]):
                term = App(f, tuple(Var(f"_a{i}") for i in range(len(args))))
                env = {f"_a{i}": a for i, a in enumerate(args)}
                table = term_table(term, env, _resolver(None), space)
                if table in seen:
                    continue
                seen.add(table)
                label = f"{f}({','.join(a.name for a in args)})"
                members.append(RandomVariable(label, space, "table", table, synthesized=True,
                                              provenance={"term": label}))
                if len(members) > cap:
                    raise CapExceededError(
                        f"term closure exceeded the cap of {cap} members",
                        [m.name for m in members],
                    )
    return fam.with_members(members[len(fam.domain):])
