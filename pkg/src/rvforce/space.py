"""Finite sample spaces and events under the uniform counting measure.

An :class:`Event` is a bit mask over sample indices (bit ``i`` set means
sample ``i`` is in the event).  Measures are exact :class:`~fractions.Fraction`
values; the infinitesimal ideal of the Boolean-valued setting is replaced by an
explicit tolerance ``eps`` in :func:`le_mod_eps` and :func:`eq_mod_eps`.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import SpaceMismatchError


class SampleSpace:
    """Ordered, duplicate-free list of ``n_bits``-bit sample points.

    Points are stored as integers; a point's bit string is its binary
    expansion padded to ``n_bits`` (most significant bit first).
    """

    __slots__ = ("n_bits", "points", "mode", "seed", "_hash")

    def __init__(self, n_bits: int, points: Sequence[int], mode: str = "explicit", seed: int | None = None):
        if n_bits < 1:
            raise ValueError("n_bits must be positive")
        points = tuple(int(p) for p in points)
        if not points:
            raise ValueError("a sample space needs at least one point")
        if len(set(points)) != len(points):
            raise ValueError("sample points must be distinct")
        if any(p < 0 or p >> n_bits for p in points):
            raise ValueError(f"sample point out of range for {n_bits} bits")
        if mode == "exhaustive" and len(points) != 1 << n_bits:
            raise ValueError("exhaustive space must list all 2^n points")
        self.n_bits = n_bits
        self.points = points
        self.mode = mode
        self.seed = seed
        self._hash = hash((n_bits, points))

    @classmethod
    def exhaustive(cls, n_bits: int) -> "SampleSpace":
        return cls(n_bits, range(1 << n_bits), "exhaustive")

    @classmethod
    def sampled(cls, n_bits: int, count: int, seed: int) -> "SampleSpace":
        """``count`` distinct points from ``random.Random(seed).getrandbits(n_bits)``, in draw order."""
        if count < 1 or count > 1 << n_bits:
            raise ValueError(f"cannot draw {count} distinct {n_bits}-bit points")
        rng = random.Random(seed)
        seen: set[int] = set()
        pts: list[int] = []
        while len(pts) < count:
            p = rng.getrandbits(n_bits)
            if p not in seen:
                seen.add(p)
                pts.append(p)
        return cls(n_bits, pts, "sampled", seed)

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.points)) - 1

    def bits(self, index: int) -> str:
        return format(self.points[index], f"0{self.n_bits}b")

    def omega(self) -> "Event":
        return Event(self, self.full_mask)

    def empty(self) -> "Event":
        return Event(self, 0)

    def event(self, indices: Iterable[int]) -> "Event":
        mask = 0
        for i in indices:
            if not 0 <= i < len(self.points):
                raise IndexError(f"sample index {i} out of range")
            mask |= 1 << i
        return Event(self, mask)

    def event_from_bools(self, flags: Iterable[bool]) -> "Event":
        bits = "".join("1" if b else "0" for b in flags)
        if len(bits) != len(self.points):
            raise ValueError("flag vector length does not match the space")
        return Event(self, int(bits[::-1], 2) if bits else 0)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, SampleSpace):
            return NotImplemented
        return self.n_bits == other.n_bits and self.points == other.points

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"SampleSpace(n_bits={self.n_bits}, N={len(self.points)}, mode={self.mode!r})"


def _check(u: "Event", v: "Event") -> None:
    if u.space is not v.space and u.space != v.space:
        raise SpaceMismatchError("events live on different sample spaces")


class Event:
    """Subset of a sample space, stored as an integer bit mask."""

    __slots__ = ("space", "mask")

    def __init__(self, space: SampleSpace, mask: int):
        self.space = space
        self.mask = mask

    def __and__(self, other: "Event") -> "Event":
        _check(self, other)
        return Event(self.space, self.mask & other.mask)

    def __or__(self, other: "Event") -> "Event":
        _check(self, other)
        return Event(self.space, self.mask | other.mask)

    def __sub__(self, other: "Event") -> "Event":
        _check(self, other)
        return Event(self.space, self.mask & ~other.mask)

    def __xor__(self, other: "Event") -> "Event":
        _check(self, other)
        return Event(self.space, self.mask ^ other.mask)

    def __invert__(self) -> "Event":
        return Event(self.space, self.space.full_mask & ~self.mask)

    def __le__(self, other: "Event") -> bool:
        _check(self, other)
        return self.mask & ~other.mask == 0

    def __ge__(self, other: "Event") -> bool:
        return other <= self

    def __eq__(self, other) -> bool:
        if not isinstance(other, Event):
            return NotImplemented
        _check(self, other)
        return self.mask == other.mask

    def __hash__(self) -> int:
        return hash(self.mask)

    def __contains__(self, index: int) -> bool:
        return bool(self.mask >> index & 1)

    def __iter__(self):
        m, i = self.mask, 0
        while m:
            if m & 1:
                yield i
            m >>= 1
            i += 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    @property
    def card(self) -> int:
        return len(self)

    def is_full(self) -> bool:
        return self.mask == self.space.full_mask

    def measure(self) -> Fraction:
        return Fraction(len(self), len(self.space))

    def hex(self) -> str:
        """Hex bit vector; the least significant bit is sample index 0."""
        width = (len(self.space) + 3) // 4
        return format(self.mask, f"0{width}x")

    def __repr__(self) -> str:
        return f"Event({sorted(self)!r})" if len(self.space) <= 64 else f"Event(card={len(self)})"


def meet(u: Event, v: Event) -> Event:
    return u & v


def join(u: Event, v: Event) -> Event:
    return u | v


def complement(u: Event) -> Event:
    return ~u


def difference(u: Event, v: Event) -> Event:
    return u - v


def measure(u: Event) -> Fraction:
    return u.measure()


def distance(u: Event, v: Event) -> Fraction:
    """Measure of the symmetric difference."""
    return (u ^ v).measure()


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (read as its decimal repr)."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def le_mod_eps(u: Event, v: Event, eps=0) -> bool:
    """``u`` is below ``v`` up to a set of measure at most ``eps``."""
    return (u - v).measure() <= as_fraction(eps)


def eq_mod_eps(u: Event, v: Event, eps=0) -> bool:
    return distance(u, v) <= as_fraction(eps)
