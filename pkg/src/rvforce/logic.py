"""Syntax of the language L and its fixed interpretation over the naturals.

L has the numerals, the unary functions ``len`` (bit-length), ``p1``/``p2``
(Cantor projections), the binary functions ``add``/``mul``/``pair`` and the
relations ``=`` and ``<=``.  Named random variables enter formulas as
constants (:class:`Const`).

Terms and formulas are immutable trees.  Hashes are cached on first use
because the evaluator keys its memo tables on formulas.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from math import isqrt
from typing import Iterable, Iterator, Union

from .errors import ArityError, UndeclaredConstantError, UnknownSymbolError

FUNCTIONS: dict[str, int] = {
    "add": 2,
    "mul": 2,
    "pair": 2,
    "len": 1,
    "p1": 1,
    "p2": 1,
}
ALIASES = {"proj1": "p1", "proj2": "p2"}
PREDICATES = {"eq": 2, "le": 2}

CLASSES = ("open", "existential", "universal", "exists-forall-prefix", "general")


def _node(cls):
    cls = dataclass(frozen=True)(cls)
    names = tuple(f.name for f in dataclasses.fields(cls))

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((cls.__name__,) + tuple(getattr(self, n) for n in names))
            self.__dict__["_hash"] = h
            return h

    cls.__hash__ = __hash__
    return cls


# -- terms -------------------------------------------------------------------


@_node
class Var:
    name: str


@_node
class Num:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("numeric literals are natural numbers")


@_node
class Const:
    """Reference to a named random variable."""

    name: str


@_node
class App:
    fn: str
    args: tuple

    def __post_init__(self):
        if self.fn not in FUNCTIONS:
            raise UnknownSymbolError(f"unknown function symbol {self.fn!r}")
        if len(self.args) != FUNCTIONS[self.fn]:
            raise ArityError(
                f"{self.fn} expects {FUNCTIONS[self.fn]} argument(s), got {len(self.args)}"
            )


Term = Union[Var, Num, Const, App]

# -- formulas ----------------------------------------------------------------


@_node
class Eq:
    left: Term
    right: Term


@_node
class Le:
    left: Term
    right: Term


@_node
class Not:
    body: "Formula"


@_node
class And:
    left: "Formula"
    right: "Formula"


@_node
class Or:
    left: "Formula"
    right: "Formula"


@_node
class Implies:
    left: "Formula"
    right: "Formula"


@_node
class Exists:
    var: str
    body: "Formula"


@_node
class Forall:
    var: str
    body: "Formula"


Formula = Union[Eq, Le, Not, And, Or, Implies, Exists, Forall]
ATOMS = (Eq, Le)
BINARY = (And, Or, Implies)
QUANTIFIERS = (Exists, Forall)


# -- small constructors --------------------------------------------------------


def fn(name: str, *args: Term) -> App:
    return App(ALIASES.get(name, name), tuple(args))


def conj(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction of a nonempty sequence."""
    it = iter(formulas)
    try:
        out = next(it)
    except StopIteration:
        raise ValueError("empty conjunction") from None
    for f in it:
        out = And(out, f)
    return out


# -- arithmetic ----------------------------------------------------------------


def bit_length(v: int) -> int:
    return v.bit_length()


def cantor_pair(x: int, y: int) -> int:
    s = x + y
    return s * (s + 1) // 2 + y


def cantor_unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def eval_function(symbol: str, args) -> int:
    """Apply a function symbol of L to natural-number arguments."""
    symbol = ALIASES.get(symbol, symbol)
    if symbol not in FUNCTIONS:
        raise UnknownSymbolError(f"unknown function symbol {symbol!r}")
    if len(args) != FUNCTIONS[symbol]:
        raise ArityError(f"{symbol} expects {FUNCTIONS[symbol]} argument(s), got {len(args)}")
    if symbol == "add":
        return args[0] + args[1]
    if symbol == "mul":
        return args[0] * args[1]
    if symbol == "pair":
        return cantor_pair(args[0], args[1])
    if symbol == "len":
        return args[0].bit_length()
    if symbol == "p1":
        return cantor_unpair(args[0])[0]
    return cantor_unpair(args[0])[1]


# -- traversal -----------------------------------------------------------------


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, App):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= term_vars(a)
        return out
    return frozenset()


def term_consts(t: Term) -> Iterator[str]:
    if isinstance(t, Const):
        yield t.name
    elif isinstance(t, App):
        for a in t.args:
            yield from term_consts(a)


def term_depth(t: Term) -> int:
    if isinstance(t, App):
        return 1 + max(term_depth(a) for a in t.args)
    return 0


def free_variables(f: Formula) -> frozenset[str]:
    cached = f.__dict__.get("_free")
    if cached is not None:
        return cached
    if isinstance(f, ATOMS):
        out = term_vars(f.left) | term_vars(f.right)
    elif isinstance(f, Not):
        out = free_variables(f.body)
    elif isinstance(f, BINARY):
        out = free_variables(f.left) | free_variables(f.right)
    else:
        out = free_variables(f.body) - {f.var}
    f.__dict__["_free"] = out
    return out


def bound_variables(f: Formula) -> list[str]:
    """Binder names in pre-order, with repetitions."""
    if isinstance(f, ATOMS):
        return []
    if isinstance(f, Not):
        return bound_variables(f.body)
    if isinstance(f, BINARY):
        return bound_variables(f.left) + bound_variables(f.right)
    return [f.var] + bound_variables(f.body)


def constants(f: Formula) -> set[str]:
    if isinstance(f, ATOMS):
        return set(term_consts(f.left)) | set(term_consts(f.right))
    if isinstance(f, Not):
        return constants(f.body)
    if isinstance(f, BINARY):
        return constants(f.left) | constants(f.right)
    return constants(f.body)


def all_names(f: Formula) -> set[str]:
    return set(free_variables(f)) | set(bound_variables(f)) | constants(f)


def is_open(f: Formula) -> bool:
    if isinstance(f, ATOMS):
        return True
    if isinstance(f, Not):
        return is_open(f.body)
    if isinstance(f, BINARY):
        return is_open(f.left) and is_open(f.right)
    return False


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return quantifier_depth(f.body)
    if isinstance(f, BINARY):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    return 1 + quantifier_depth(f.body)


def split_prefix(f: Formula) -> tuple[list[tuple[str, str]], Formula]:
    """Peel the leading quantifier block: ([("exists"|"forall", var), ...], matrix)."""
    prefix = []
    while isinstance(f, QUANTIFIERS):
        prefix.append(("exists" if isinstance(f, Exists) else "forall", f.var))
        f = f.body
    return prefix, f


def classify_formula(f: Formula) -> str:
    prefix, matrix = split_prefix(f)
    if not is_open(matrix):
        return "general"
    kinds = [q for q, _ in prefix]
    if not kinds:
        return "open"
    if all(k == "exists" for k in kinds):
        return "existential"
    if all(k == "forall" for k in kinds):
        return "universal"
    alternating = all(k == ("exists" if i % 2 == 0 else "forall") for i, k in enumerate(kinds))
    return "exists-forall-prefix" if alternating else "general"


def fresh_name(base: str, used: set[str]) -> str:
    if base not in used:
        return base
    i = 1
    while f"{base}_{i}" in used:
        i += 1
    return f"{base}_{i}"


# -- substitution ----------------------------------------------------------------


def substitute_term_in_term(t: Term, var: str, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.name == var else t
    if isinstance(t, App):
        return App(t.fn, tuple(substitute_term_in_term(a, var, s) for a in t.args))
    return t


def substitute(f: Formula, var: str, s: Term) -> Formula:
    """Capture-avoiding replacement of free ``var`` by the term ``s``."""
    if var not in free_variables(f):
        return f
    if isinstance(f, ATOMS):
        return type(f)(substitute_term_in_term(f.left, var, s), substitute_term_in_term(f.right, var, s))
    if isinstance(f, Not):
        return Not(substitute(f.body, var, s))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, var, s), substitute(f.right, var, s))
    body, bv = f.body, f.var
    if bv in term_vars(s):
        new = fresh_name(bv, all_names(f.body) | term_vars(s) | {var})
        body = substitute(body, bv, Var(new))
        bv = new
    return type(f)(bv, substitute(body, var, s))


def substitute_const(f: Formula, var: str, rv: str, declared: Iterable[str] | None = None) -> Formula:
    """Replace free ``var`` by the random-variable constant ``rv``.

    Warns and returns ``f`` unchanged when ``var`` is not free.
    """
    if declared is not None and rv not in set(declared):
        raise UndeclaredConstantError(f"random variable {rv!r} is not declared")
    if var not in free_variables(f):
        warnings.warn(f"variable {var!r} is not free; formula unchanged", stacklevel=2)
        return f
    return substitute(f, var, Const(rv))


def rename_bound(f: Formula, old: str, new: str) -> Formula:
    """Rename the outermost binder of ``f`` (a quantifier over ``old``)."""
    return type(f)(new, substitute(f.body, old, Var(new)))


def rename_apart(f: Formula, reserved: Iterable[str] = ()) -> Formula:
    """Give every binder a distinct name, distinct from free variables too.

    The first binder of each name keeps it when that does not clash, so
    already-distinct formulas are returned structurally unchanged.
    """
    used = set(reserved) | all_names(f)
    taken = set(free_variables(f)) | set(reserved)

    def go(g: Formula) -> Formula:
        if isinstance(g, ATOMS):
            return g
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, BINARY):
            left = go(g.left)
            return type(g)(left, go(g.right))
        var = g.var
        body = g.body
        if var in taken:
            new = fresh_name(var, used)
            used.add(new)
            body = substitute(body, var, Var(new))
            var = new
        taken.add(var)
        return type(g)(var, go(body))

    return go(f)
