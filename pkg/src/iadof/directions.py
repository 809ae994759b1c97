"""Formal monomials in channel coefficients and ordered sets of them.

A direction is a product of channel coefficients raised to non-negative
integer powers.  Equality, containment, and set algebra are all exact
symbolic operations on exponent vectors; nothing here ever compares
floating-point products.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping

from .channel import ChannelRealization, CoefficientId

MAX_EXPONENT = 2**31 - 1
MAX_TOTAL_DEGREE = 1_000_000


class Direction:
    """Immutable monomial, stored as a flat tuple.

    Layout: (k1, j1, n1, m1, e1, k2, j2, n2, m2, e2, ...) with coefficient
    ids strictly increasing lexicographically and every exponent positive.
    The empty tuple is the unit monomial.  Use direction() to build one from
    a mapping; the raw constructor trusts its input.
    """

    __slots__ = ("_flat", "_hash")

    def __init__(self, flat: tuple[int, ...]):
        self._flat = flat
        self._hash = hash(flat)

    @property
    def flat(self) -> tuple[int, ...]:
        return self._flat

    def exponents(self) -> dict[CoefficientId, int]:
        f = self._flat
        return {(f[i], f[i + 1], f[i + 2], f[i + 3]): f[i + 4] for i in range(0, len(f), 5)}

    def exponent(self, cid: CoefficientId) -> int:
        f = self._flat
        for i in range(0, len(f), 5):
            if (f[i], f[i + 1], f[i + 2], f[i + 3]) == cid:
                return f[i + 4]
        return 0

    def total_degree(self) -> int:
        return sum(self._flat[4::5])

    def __mul__(self, other: "Direction") -> "Direction":
        if not isinstance(other, Direction):
            return NotImplemented
        return mono_mul(self, other)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, Direction):
            return NotImplemented
        return self._flat == other._flat

    def __lt__(self, other: "Direction") -> bool:
        return self._flat < other._flat

    def __le__(self, other: "Direction") -> bool:
        return self._flat <= other._flat

    def __gt__(self, other: "Direction") -> bool:
        return self._flat > other._flat

    def __ge__(self, other: "Direction") -> bool:
        return self._flat >= other._flat

    def __repr__(self) -> str:
        return f"Direction({self.text()})"

    def text(self) -> str:
        """Readable form, e.g. H[1,2](1,1)^3 * H[2,2](2,1)."""
        f = self._flat
        if not f:
            return "1"
        parts = []
        for i in range(0, len(f), 5):
            k, j, n, m, e = f[i : i + 5]
            base = f"H[{k},{j}]({n},{m})"
            parts.append(base if e == 1 else f"{base}^{e}")
        return " * ".join(parts)


UNIT = Direction(())


def direction(exponents: Mapping[CoefficientId, int]) -> Direction:
    """Canonicalize a {coefficient id: exponent} mapping into a Direction.

    Zero exponents are dropped; negative ones are rejected.
    """
    items = []
    total = 0
    for cid, e in exponents.items():
        if e == 0:
            continue
        if e < 0:
            raise ValueError(f"negative exponent {e} for {cid}")
        if e > MAX_EXPONENT:
            raise OverflowError(f"exponent {e} for {cid} exceeds {MAX_EXPONENT}")
        items.append((cid, e))
        total += e
    if total > MAX_TOTAL_DEGREE:
        raise OverflowError(f"total degree {total} exceeds {MAX_TOTAL_DEGREE}")
    items.sort()
    flat = []
    for (k, j, n, m), e in items:
        flat.extend((k, j, n, m, e))
    return Direction(tuple(flat))


def mono_mul(a: Direction, b: Direction) -> Direction:
    """Exact product: merge the two sorted exponent lists, adding exponents."""
    fa, fb = a.flat, b.flat
    if not fa:
        return b
    if not fb:
        return a
    out: list[int] = []
    ia = ib = 0
    la, lb = len(fa), len(fb)
    total = 0
    while ia < la and ib < lb:
        ka = fa[ia : ia + 4]
        kb = fb[ib : ib + 4]
        if ka == kb:
            e = fa[ia + 4] + fb[ib + 4]
            if e > MAX_EXPONENT:
                raise OverflowError(f"exponent {e} exceeds {MAX_EXPONENT}")
            out.extend(ka)
            out.append(e)
            total += e
            ia += 5
            ib += 5
        elif ka < kb:
            out.extend(fa[ia : ia + 5])
            total += fa[ia + 4]
            ia += 5
        else:
            out.extend(fb[ib : ib + 5])
            total += fb[ib + 4]
            ib += 5
    rest = fa[ia:] if ia < la else fb[ib:]
    out.extend(rest)
    total += sum(rest[4::5])
    if total > MAX_TOTAL_DEGREE:
        raise OverflowError(f"total degree {total} exceeds {MAX_TOTAL_DEGREE}")
    return Direction(tuple(out))


def mono_eval(d: Direction, h: ChannelRealization) -> float:
    """Numeric value of the monomial under a concrete channel draw."""
    f = d.flat
    v = 1.0
    for i in range(0, len(f), 5):
        cid = (f[i], f[i + 1], f[i + 2], f[i + 3])
        v *= h.gains[cid] ** f[i + 4]
    return v


class DirectionSet:
    """Finite ordered set of directions.

    Iteration order is the canonical sort order of the members, which makes
    every downstream artifact (vectors, JSON, candidate lattices) reproducible.
    """

    __slots__ = ("_members", "_lookup")

    def __init__(self, members: Iterable[Direction] = ()):
        self._members = tuple(sorted(set(members)))
        self._lookup = frozenset(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[Direction]:
        return iter(self._members)

    def __contains__(self, d: Direction) -> bool:
        return d in self._lookup

    def __getitem__(self, i: int) -> Direction:
        return self._members[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirectionSet):
            return NotImplemented
        return self._members == other._members

    def __hash__(self) -> int:
        return hash(self._members)

    def __repr__(self) -> str:
        return f"DirectionSet(<{len(self._members)} directions>)"

    def union(self, other: "DirectionSet") -> "DirectionSet":
        return DirectionSet(self._members + other._members)

    def intersect(self, other: "DirectionSet") -> "DirectionSet":
        return DirectionSet(d for d in self._members if d in other._lookup)

    def difference(self, other: "DirectionSet") -> "DirectionSet":
        return DirectionSet(d for d in self._members if d not in other._lookup)

    def scale(self, d: Direction) -> "DirectionSet":
        """Multiply every member by a fixed monomial."""
        return DirectionSet(mono_mul(m, d) for m in self._members)

    def head(self, cap: int) -> "DirectionSet":
        """First cap members in canonical order."""
        if cap < 0:
            raise ValueError(f"cap must be non-negative, got {cap}")
        return DirectionSet(self._members[:cap])

    def evaluate(self, h: ChannelRealization) -> list[float]:
        return [mono_eval(d, h) for d in self._members]
