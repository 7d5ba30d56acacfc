"""Monotonic MDPs, their predecessor operators and symbolic partitions."""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Hashable, Iterable, NamedTuple, Sequence

from .lattice import Semilattice
from .pseudo import PseudoAntichain, pe_canonicalize, simplify


class Block(NamedTuple):
    region: PseudoAntichain
    payload: Any


class PaPartition:
    """Disjoint pseudo-antichain blocks, each tagged with a payload.

    ``domain`` is the union of the blocks; it is computed lazily when not
    given.  Blocks are never empty.
    """

    __slots__ = ("lattice", "blocks", "_domain")

    def __init__(self, lattice: Semilattice, blocks: Iterable = (), domain: PseudoAntichain | None = None):
        self.lattice = lattice
        self.blocks = [Block(r, p) for r, p in blocks if not r.is_empty()]
        self._domain = domain

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __repr__(self):
        inner = ", ".join(f"{r.format()}: {p!r}" for r, p in self.blocks)
        return f"PaPartition[{inner}]"

    @property
    def domain(self) -> PseudoAntichain:
        if self._domain is None:
            pes = []
            for r, _ in self.blocks:
                pes.extend(r.elems)
            self._domain = PseudoAntichain(self.lattice, simplify(pes, self.lattice))
        return self._domain

    def payloads(self) -> list:
        return [p for _, p in self.blocks]

    def lookup(self, s, default=None):
        for region, payload in self.blocks:
            if s in region:
                return payload
        return default

    def index_of(self, s) -> int:
        for i, (region, _) in enumerate(self.blocks):
            if s in region:
                return i
        return -1

    def region_of(self, payload) -> PseudoAntichain:
        pes = []
        for r, p in self.blocks:
            if p == payload:
                pes.extend(r.elems)
        return PseudoAntichain(self.lattice, simplify(pes, self.lattice))

    def restrict(self, region: PseudoAntichain) -> "PaPartition":
        return PaPartition(self.lattice, ((r & region, p) for r, p in self.blocks))

    def merged(self) -> "PaPartition":
        """Coarsen by gathering blocks with equal payloads (first-seen order)."""
        groups: dict = {}
        for r, p in self.blocks:
            groups.setdefault(p, []).extend(r.elems)
        lat = self.lattice
        return PaPartition(
            lat,
            ((PseudoAntichain(lat, simplify(pes, lat)), p) for p, pes in groups.items()),
            self._domain,
        )

    def map(self, fn) -> "PaPartition":
        return PaPartition(self.lattice, ((r, fn(p)) for r, p in self.blocks), self._domain)

    def enumerate(self) -> list[tuple[set, Any]]:
        return [(r.enumerate(), p) for r, p in self.blocks]

    def size(self) -> int:
        return sum(r.size() for r, _ in self.blocks)


Strategy = PaPartition


def partition_refine(P: PaPartition, Q: PaPartition, check_domain: bool = True) -> PaPartition:
    """Coarsest common refinement; payloads become ``(p, q)`` pairs."""
    if check_domain and not P.domain.equals(Q.domain):
        raise ValueError("partitions do not share a domain")
    blocks = []
    for rp, p in P.blocks:
        for rq, q in Q.blocks:
            inter = rp & rq
            if not inter.is_empty():
                blocks.append((inter, (p, q)))
    return PaPartition(P.lattice, blocks, P._domain)


def partition_validate(P: PaPartition, domain: PseudoAntichain | None = None) -> bool:
    """Blocks nonempty, pairwise disjoint, and covering ``domain`` when given."""
    blocks = P.blocks
    for i, (r, _) in enumerate(blocks):
        if r.is_empty():
            return False
        for j in range(i + 1, len(blocks)):
            if not r.isdisjoint(blocks[j].region):
                return False
    if domain is not None:
        if not P.domain.equals(domain):
            return False
    return True


class MonotonicMdp:
    """Behavioural interface of a monotonic MDP.

    A concrete model provides the successor, probability and cost functions,
    the antichain predecessor oracle :meth:`pre_max`, and pseudo-antichain
    representations of the state space and goal set.  ``pre_max(x, a, t)``
    returns the maximal states ``s`` with action ``a`` enabled and
    ``successor(s, a, t)`` below ``x``.

    Effects listed by :meth:`effects` are the support of the action's
    distribution: their probabilities are strictly positive.
    """

    lattice: Semilattice

    def actions(self) -> Sequence[Hashable]:
        raise NotImplementedError

    def effects(self, action) -> Sequence[Hashable]:
        raise NotImplementedError

    def successor(self, s, action, effect):
        raise NotImplementedError

    def prob(self, action, effect, s=None) -> Fraction:
        raise NotImplementedError

    def cost(self, action, s=None) -> Fraction:
        raise NotImplementedError

    def pre_max(self, x, action, effect) -> frozenset:
        raise NotImplementedError

    def states_pa(self) -> PseudoAntichain:
        raise NotImplementedError

    def goal_pa(self) -> PseudoAntichain | None:
        return None

    def initial_state(self):
        return None

    def action_name(self, action) -> str:
        return str(action)

    def dist_partition(self, action) -> PaPartition:
        """Blocks of the enabled region with the distribution as payload.

        The default assumes the distribution does not depend on the state.
        """
        dist = tuple(self.prob(action, t) for t in self.effects(action))
        return PaPartition(self.lattice, [(enabled_region(self, action), dist)])

    def cost_partition(self, action) -> PaPartition:
        return PaPartition(self.lattice, [(enabled_region(self, action), self.cost(action))])

    def enabled(self, s, action) -> bool:
        return s in enabled_region(self, action)


_CACHE_LIMIT = 50_000


def _cache(mdp) -> dict:
    try:
        return mdp.__dict__["_pa_cache"]
    except KeyError:
        c = mdp.__dict__["_pa_cache"] = {}
        return c


def clear_cache(mdp) -> None:
    mdp.__dict__.pop("_pa_cache", None)


def pre_sigma_tau(mdp: MonotonicMdp, A: PseudoAntichain, action, effect) -> PseudoAntichain:
    """States where ``action`` is enabled and whose ``effect``-successor is in ``A``."""
    lat = mdp.lattice
    if not A.elems:
        return A
    cache = _cache(mdp)
    key = ("pre", A.elems, action, effect)
    hit = cache.get(key)
    if hit is not None:
        return hit
    pre_max = mdp.pre_max
    pes = []
    for x, alpha in A.elems:
        tops = pre_max(x, action, effect)
        if not tops:
            continue
        below = []
        for a in alpha:
            below.extend(pre_max(a, action, effect))
        beta = lat.maximal(below)
        for t in tops:
            pe = pe_canonicalize(t, beta, lat)
            if pe is not None:
                pes.append(pe)
    out = PseudoAntichain(lat, simplify(pes, lat))
    if len(cache) > _CACHE_LIMIT:
        cache.clear()
    cache[key] = out
    return out


def enabled_region(mdp: MonotonicMdp, action) -> PseudoAntichain:
    """The closed set of states where ``action`` is enabled."""
    cache = _cache(mdp)
    key = ("enabled", action)
    hit = cache.get(key)
    if hit is None:
        effects = mdp.effects(action)
        S = mdp.states_pa()
        hit = pre_sigma_tau(mdp, S, action, effects[0]) if effects else PseudoAntichain.empty(mdp.lattice)
        cache[key] = hit
    return hit


def allow_region(mdp: MonotonicMdp, action, Y: PseudoAntichain) -> PseudoAntichain:
    """States where ``action`` is enabled and keeps every successor inside ``Y``."""
    out = None
    for t in mdp.effects(action):
        pre = pre_sigma_tau(mdp, Y, action, t)
        out = pre if out is None else out & pre
        if out.is_empty():
            break
    return out if out is not None else PseudoAntichain.empty(mdp.lattice)


def exists_pre(mdp: MonotonicMdp, action, X: PseudoAntichain) -> PseudoAntichain:
    """States from which ``action`` reaches ``X`` with positive probability."""
    pes = []
    for t in mdp.effects(action):
        pes.extend(pre_sigma_tau(mdp, X, action, t).elems)
    return PseudoAntichain(mdp.lattice, simplify(pes, mdp.lattice))


def pre_lambda(mdp: MonotonicMdp, C: PseudoAntichain, action, effect, strategy: Strategy) -> PseudoAntichain:
    """States that play ``action`` under ``strategy`` and reach ``C`` by ``effect``.

    Effects are per action, so the global effect alphabet is the disjoint
    union of ``(action, effect)`` pairs; states playing another action never
    take this effect.
    """
    pre = pre_sigma_tau(mdp, C, action, effect)
    if pre.is_empty():
        return pre
    pes = []
    for region, a in strategy.blocks:
        if a == action:
            pes.extend((pre & region).elems)
    return PseudoAntichain(mdp.lattice, simplify(pes, mdp.lattice))


def strategy_action(strategy: Strategy, s):
    return strategy.lookup(s)


def strategies_equal(l1: Strategy, l2: Strategy) -> bool:
    """Equality of the induced state-to-action functions."""
    if not l1.domain.equals(l2.domain):
        raise ValueError("strategies have different domains")
    actions = set(l1.payloads()) | set(l2.payloads())
    return all(l1.region_of(a).equals(l2.region_of(a)) for a in actions)
