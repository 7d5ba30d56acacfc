"""Lower semilattices and antichains over them.

An antichain is stored as a ``frozenset`` of lattice elements that are pairwise
incomparable; it stands for its downward closure.  The operations live on the
lattice object so that concrete lattices can override them with faster
specialised versions (see :class:`SupersetLattice`).
"""
from __future__ import annotations

import itertools
from typing import Hashable, Iterable, Iterator, Sequence

Element = Hashable
Antichain = frozenset

EMPTY_ANTICHAIN: frozenset = frozenset()


class CapabilityError(TypeError):
    """Raised when an operation needs a capability the lattice lacks."""


class Semilattice:
    """Base class for a finite lower semilattice ``(S, <=)``.

    Subclasses must provide :meth:`leq` and :meth:`meet`.  :meth:`elements` is
    optional and only used by test oracles.
    """

    enumerable = False

    def leq(self, a, b) -> bool:
        raise NotImplementedError

    def meet(self, a, b):
        raise NotImplementedError

    def elements(self) -> Iterator:
        raise CapabilityError(f"{type(self).__name__} cannot enumerate its elements")

    def size(self) -> int:
        raise CapabilityError(f"{type(self).__name__} has no known size")

    def key(self, a):
        """Total storage order; unrelated to ``leq``."""
        return a

    def format(self, a) -> str:
        return str(a)

    # -- antichains ------------------------------------------------------

    def maximal(self, elems: Iterable) -> frozenset:
        """The antichain of maximal elements of a finite set."""
        pool = list(set(elems))
        keep = []
        for i, a in enumerate(pool):
            dominated = False
            for j, b in enumerate(pool):
                if i != j and self.leq(a, b):
                    dominated = True
                    break
            if not dominated:
                keep.append(a)
        return frozenset(keep)

    def ac_member(self, s, alpha: Iterable) -> bool:
        leq = self.leq
        return any(leq(s, a) for a in alpha)

    def ac_union(self, alpha1: frozenset, alpha2: frozenset) -> frozenset:
        if not alpha1:
            return alpha2
        if not alpha2:
            return alpha1
        return self.maximal(alpha1 | alpha2)

    def ac_intersect(self, alpha1: frozenset, alpha2: frozenset) -> frozenset:
        meet = self.meet
        return self.maximal(meet(a, b) for a in alpha1 for b in alpha2)

    def ac_subset(self, alpha1: Iterable, alpha2: Iterable) -> bool:
        alpha2 = tuple(alpha2)
        return all(self.ac_member(a, alpha2) for a in alpha1)

    # -- pseudo-element kernels -------------------------------------------

    def pe_canonical(self, x, alpha: Iterable) -> frozenset | None:
        """Canonical antichain ``maximal({x meet a})``, or ``None`` if ``x`` is below ``alpha``."""
        leq = self.leq
        for a in alpha:
            if leq(x, a):
                return None
        meet = self.meet
        return self.maximal(meet(x, a) for a in alpha)

    def pe_included(self, x, alpha, y, beta) -> bool:
        """Whether ``down(x) - down(alpha)`` is included in ``down(y) - down(beta)``."""
        if not self.leq(x, y):
            return False
        meet = self.meet
        return all(self.ac_member(meet(b, x), alpha) for b in beta)

    def pe_intersect_all(self, A: Iterable, B: Iterable) -> list:
        """Canonical ``(x, alpha)`` pairs of all nonempty pairwise intersections."""
        meet = self.meet
        out = []
        B = tuple(B)
        for x, alpha in A:
            for y, beta in B:
                canon = self.pe_canonical(meet(x, y), alpha | beta)
                if canon is not None:
                    out.append((meet(x, y), canon))
        return out

    def pe_prune(self, items: list) -> list:
        """Drop every ``(x, alpha)`` included in another member (distinct ``x`` assumed)."""
        included = self.pe_included
        kept = []
        for i, (x, alpha) in enumerate(items):
            for j, (y, beta) in enumerate(items):
                if i != j and included(x, alpha, y, beta):
                    break
            else:
                kept.append(items[i])
        return kept

    def closure(self, alpha: Iterable) -> set:
        """Enumerate the downward closure of ``alpha`` (oracle use only)."""
        alpha = tuple(alpha)
        return {s for s in self.elements() if self.ac_member(s, alpha)}


class ProductNatLattice(Semilattice):
    """Tuples in ``[0, bound]^dimension`` ordered componentwise."""

    enumerable = True

    def __init__(self, dimension: int, bound: int | Sequence[int]):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        if isinstance(bound, int):
            bound = (bound,) * dimension
        if len(bound) != dimension:
            raise ValueError("one bound per dimension expected")
        self.dimension = dimension
        self.bound = tuple(bound)

    def __repr__(self):
        return f"ProductNatLattice({self.dimension}, {self.bound})"

    def leq(self, a, b):
        return all(x <= y for x, y in zip(a, b))

    def meet(self, a, b):
        return tuple(min(x, y) for x, y in zip(a, b))

    def top(self):
        return self.bound

    def elements(self):
        return itertools.product(*(range(b + 1) for b in self.bound))

    def size(self):
        n = 1
        for b in self.bound:
            n *= b + 1
        return n

    def contains(self, a) -> bool:
        return len(a) == self.dimension and all(0 <= x <= b for x, b in zip(a, self.bound))

    def maximal(self, elems):
        pool = sorted(set(elems), key=sum, reverse=True)
        keep = []
        for a in pool:
            if not any(all(x <= y for x, y in zip(a, k)) for k in keep):
                keep.append(a)
        return frozenset(keep)


def popcount(x: int) -> int:
    return x.bit_count()


class SupersetLattice(Semilattice):
    """Subsets of a finite universe ordered by reverse inclusion.

    ``s <= s'`` iff ``s`` is a superset of ``s'``; the meet is set union and
    the top element is the empty set.  Subsets are encoded as int bitmasks,
    bit ``i`` standing for ``universe[i]``.
    """

    enumerable = True

    def __init__(self, universe: Sequence[str]):
        self.universe = tuple(universe)
        if len(set(self.universe)) != len(self.universe):
            raise ValueError("duplicate names in universe")
        self.index = {name: i for i, name in enumerate(self.universe)}
        self.full = (1 << len(self.universe)) - 1

    def __repr__(self):
        return f"SupersetLattice({list(self.universe)})"

    def leq(self, a, b):
        return a & b == b

    def meet(self, a, b):
        return a | b

    def top(self):
        return 0

    def elements(self):
        return iter(range(self.full + 1))

    def size(self):
        return self.full + 1

    def key(self, a):
        return (popcount(a), a)

    def encode(self, names: Iterable[str]) -> int:
        mask = 0
        for name in names:
            mask |= 1 << self.index[name]
        return mask

    def decode(self, mask: int) -> frozenset:
        return frozenset(n for i, n in enumerate(self.universe) if mask >> i & 1)

    def format(self, a):
        return "{" + ",".join(n for i, n in enumerate(self.universe) if a >> i & 1) + "}"

    # bitmask fast paths

    def maximal(self, elems):
        pool = sorted(set(elems), key=int.bit_count)
        keep = []
        for a in pool:
            for k in keep:
                if a & k == k:
                    break
            else:
                keep.append(a)
        return frozenset(keep)

    def ac_member(self, s, alpha):
        for a in alpha:
            if s & a == a:
                return True
        return False

    def ac_intersect(self, alpha1, alpha2):
        return self.maximal(a | b for a in alpha1 for b in alpha2)

    def pe_canonical(self, x, alpha):
        meets = []
        for a in alpha:
            if x & a == a:
                return None
            meets.append(x | a)
        return self.maximal(meets) if meets else EMPTY_ANTICHAIN

    def pe_included(self, x, alpha, y, beta):
        if x & y != y:
            return False
        for b in beta:
            bx = b | x
            for a in alpha:
                if bx & a == a:
                    break
            else:
                return False
        return True

    def pe_intersect_all(self, A, B):
        out = []
        B = tuple(B)
        maximal = self.maximal
        for x, alpha in A:
            for y, beta in B:
                z = x | y
                for a in alpha:
                    if z & a == a:
                        break
                else:
                    for b in beta:
                        if z & b == b:
                            break
                    else:
                        out.append((z, maximal([z | a for a in alpha] + [z | b for b in beta])))
        return out

    def pe_prune(self, items):
        if len(items) < 2:
            return items
        # only a member with fewer conditions in x can include another
        order = sorted(range(len(items)), key=lambda i: items[i][0].bit_count())
        kept = []
        for pos, i in enumerate(order):
            x, alpha = items[i]
            for j in order[:pos]:
                y, beta = items[j]
                if x & y != y:
                    continue
                for b in beta:
                    bx = b | x
                    for a in alpha:
                        if bx & a == a:
                            break
                    else:
                        break
                else:
                    break
            else:
                kept.append(items[i])
        return kept

    def ac_subset(self, alpha1, alpha2):
        alpha2 = tuple(alpha2)
        for a in alpha1:
            for b in alpha2:
                if a & b == b:
                    break
            else:
                return False
        return True


# Module-level spellings of the antichain operations.

def maximal_elements(elems: Iterable, lat: Semilattice) -> frozenset:
    return lat.maximal(elems)


def ac_member(s, alpha: frozenset, lat: Semilattice) -> bool:
    return lat.ac_member(s, alpha)


def ac_union(alpha1: frozenset, alpha2: frozenset, lat: Semilattice) -> frozenset:
    return lat.ac_union(alpha1, alpha2)


def ac_intersect(alpha1: frozenset, alpha2: frozenset, lat: Semilattice) -> frozenset:
    return lat.ac_intersect(alpha1, alpha2)


def ac_subset(alpha1: frozenset, alpha2: frozenset, lat: Semilattice) -> bool:
    return lat.ac_subset(alpha1, alpha2)


def is_antichain(alpha: Iterable, lat: Semilattice) -> bool:
    alpha = list(alpha)
    return not any(
        i != j and lat.leq(a, b) for i, a in enumerate(alpha) for j, b in enumerate(alpha)
    )
