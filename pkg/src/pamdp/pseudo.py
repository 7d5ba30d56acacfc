"""Pseudo-elements and pseudo-antichains.

A pseudo-element ``(x, alpha)`` denotes ``down(x) minus down(alpha)``; a
pseudo-antichain denotes the union of its members.  Unlike antichains, these
are closed under difference, so every Boolean operation stays symbolic.

All pseudo-antichains built here are kept *simplified*: members are in
canonical form (every ``a`` in ``alpha`` lies below ``x``), have pairwise
distinct ``x`` and no member's closure is included in another's.  Since every
canonical member denotes a nonempty set, emptiness is a syntactic check.
"""
from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple

from .lattice import EMPTY_ANTICHAIN, CapabilityError, Semilattice


class PseudoElement(NamedTuple):
    x: object
    alpha: frozenset


def pe_canonicalize(x, alpha: Iterable, lat: Semilattice) -> PseudoElement | None:
    """Canonical form of ``(x, alpha)``, or ``None`` when it denotes the empty set."""
    canon = lat.pe_canonical(x, alpha)
    return None if canon is None else PseudoElement(x, canon)


def pe_member(s, pe: PseudoElement, lat: Semilattice) -> bool:
    return lat.leq(s, pe.x) and not lat.ac_member(s, pe.alpha)


def pe_subset(pe1: PseudoElement, pe2: PseudoElement, lat: Semilattice) -> bool:
    """Inclusion of pseudo-closures, decided on the representations alone."""
    return lat.pe_included(pe1.x, pe1.alpha, pe2.x, pe2.alpha)


def pe_intersect(pe1: PseudoElement, pe2: PseudoElement, lat: Semilattice) -> PseudoElement | None:
    return pe_canonicalize(lat.meet(pe1.x, pe2.x), pe1.alpha | pe2.alpha, lat)


def pe_difference(pe1: PseudoElement, pe2: PseudoElement, lat: Semilattice) -> list[PseudoElement]:
    """``pe1 \\ pe2`` as a list of canonical pseudo-elements (not simplified)."""
    x, alpha = pe1
    meet = lat.meet
    xy = meet(x, pe2.x)
    # disjoint closures: nothing to remove
    if lat.ac_member(xy, alpha) or lat.ac_member(xy, pe2.alpha):
        return [pe1]
    out = []
    if xy != x:
        # canonical form of (x, {y} U alpha): alpha already lies below x
        out.append(PseudoElement(x, lat.maximal(alpha | {xy})))
    for b in pe2.alpha:
        pe = pe_canonicalize(meet(x, b), alpha, lat)
        if pe is not None:
            out.append(pe)
    return out


def simplify(pes: Iterable[PseudoElement], lat: Semilattice) -> tuple:
    """Merge members with equal ``x`` and drop members included in others.

    Input members must already be canonical.  Returns a tuple sorted by the
    lattice storage order of ``x``.
    """
    by_x: dict = {}
    for pe in pes:
        prev = by_x.get(pe.x)
        if prev is None:
            by_x[pe.x] = pe.alpha
        elif prev != pe.alpha:
            by_x[pe.x] = lat.ac_intersect(prev, pe.alpha)
    items = [PseudoElement(x, a) for x, a in by_x.items()]
    if len(items) > 1:
        items = lat.pe_prune(items)
    key = lat.key
    items.sort(key=lambda pe: key(pe.x))
    return tuple(items)


class PseudoAntichain:
    """A simplified pseudo-antichain over ``lattice``.

    ``==`` is not overloaded; use :meth:`equals` for equality of the denoted
    sets.  Python operators ``|``, ``&``, ``-`` and ``<=`` work on denotations.
    """

    __slots__ = ("lattice", "elems")

    def __init__(self, lattice: Semilattice, elems: tuple = ()):
        self.lattice = lattice
        self.elems = elems

    # constructors

    @classmethod
    def empty(cls, lattice):
        return cls(lattice, ())

    @classmethod
    def from_pairs(cls, lattice, pairs: Iterable) -> "PseudoAntichain":
        """Build from arbitrary ``(x, alpha)`` pairs; invalid ones are dropped."""
        pes = []
        for x, alpha in pairs:
            pe = pe_canonicalize(x, frozenset(alpha), lattice)
            if pe is not None:
                pes.append(pe)
        return cls(lattice, simplify(pes, lattice))

    @classmethod
    def closed(cls, lattice, antichain: Iterable) -> "PseudoAntichain":
        """The closed set ``down(antichain)``."""
        top = lattice.maximal(antichain)
        return cls(lattice, simplify((PseudoElement(x, EMPTY_ANTICHAIN) for x in top), lattice))

    @classmethod
    def _of(cls, lattice, pes) -> "PseudoAntichain":
        return cls(lattice, simplify(pes, lattice))

    # inspection

    def __iter__(self) -> Iterator[PseudoElement]:
        return iter(self.elems)

    def __len__(self):
        return len(self.elems)

    def __bool__(self):
        return bool(self.elems)

    def is_empty(self) -> bool:
        return not self.elems

    def size(self) -> int:
        """Representation size: members plus antichain entries."""
        return sum(1 + len(pe.alpha) for pe in self.elems)

    def __contains__(self, s) -> bool:
        lat = self.lattice
        return any(pe_member(s, pe, lat) for pe in self.elems)

    def is_closed_repr(self) -> bool:
        return all(not pe.alpha for pe in self.elems)

    # Boolean algebra

    def union(self, other: "PseudoAntichain") -> "PseudoAntichain":
        if not self.elems:
            return other
        if not other.elems:
            return self
        return PseudoAntichain._of(self.lattice, self.elems + other.elems)

    def intersection(self, other: "PseudoAntichain") -> "PseudoAntichain":
        if not self.elems or not other.elems:
            return PseudoAntichain(self.lattice, ())
        lat = self.lattice
        out = [PseudoElement(x, a) for x, a in lat.pe_intersect_all(self.elems, other.elems)]
        return PseudoAntichain._of(lat, out)

    def difference(self, other: "PseudoAntichain") -> "PseudoAntichain":
        lat = self.lattice
        cur = self.elems
        for b in other.elems:
            if not cur:
                break
            nxt = []
            changed = False
            for a in cur:
                parts = pe_difference(a, b, lat)
                if len(parts) != 1 or parts[0] is not a:
                    changed = True
                nxt.extend(parts)
            if changed:
                cur = simplify(nxt, lat)
        return PseudoAntichain(lat, cur)

    def issubset(self, other: "PseudoAntichain") -> bool:
        lat = self.lattice
        # cheap sufficient test before falling back to difference
        if all(any(pe_subset(a, b, lat) for b in other.elems) for a in self.elems):
            return True
        return self.difference(other).is_empty()

    def equals(self, other: "PseudoAntichain") -> bool:
        return self.issubset(other) and other.issubset(self)

    def isdisjoint(self, other: "PseudoAntichain") -> bool:
        lat = self.lattice
        meet, member = lat.meet, lat.ac_member
        for x, alpha in self.elems:
            for y, beta in other.elems:
                xy = meet(x, y)
                if not member(xy, alpha) and not member(xy, beta):
                    return False
        return True

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __le__ = issubset

    # oracle / debug

    def enumerate(self) -> set:
        lat = self.lattice
        if not lat.enumerable:
            raise CapabilityError(f"{type(lat).__name__} cannot enumerate its elements")
        if not self.elems:
            return set()
        return {s for s in lat.elements() if s in self}

    def pick(self):
        """A deterministic member: the ``x`` of the first stored pseudo-element."""
        if not self.elems:
            raise ValueError("cannot pick from an empty pseudo-antichain")
        return self.elems[0].x

    def format(self) -> str:
        fmt = self.lattice.format
        key = self.lattice.key
        parts = []
        for pe in self.elems:
            alpha = ", ".join(fmt(a) for a in sorted(pe.alpha, key=key))
            parts.append(f"({fmt(pe.x)} | {alpha})")
        return "{" + ", ".join(parts) + "}"

    def __repr__(self):
        return f"PseudoAntichain{self.format()}"


# Module-level spellings.

def pa_union(A: PseudoAntichain, B: PseudoAntichain) -> PseudoAntichain:
    return A.union(B)


def pa_intersect(A: PseudoAntichain, B: PseudoAntichain) -> PseudoAntichain:
    return A.intersection(B)


def pa_difference(A: PseudoAntichain, B: PseudoAntichain) -> PseudoAntichain:
    return A.difference(B)


def pa_is_empty(A: PseudoAntichain) -> bool:
    return A.is_empty()


def pa_subset(A: PseudoAntichain, B: PseudoAntichain) -> bool:
    return A.issubset(B)


def pa_equal(A: PseudoAntichain, B: PseudoAntichain) -> bool:
    return A.equals(B)


def pa_enumerate(A: PseudoAntichain) -> set:
    return A.enumerate()


def pa_pick(A: PseudoAntichain):
    return A.pick()


def pa_union_all(lattice, pas: Iterable[PseudoAntichain]) -> PseudoAntichain:
    pes = []
    for A in pas:
        pes.extend(A.elems)
    return PseudoAntichain._of(lattice, pes)
