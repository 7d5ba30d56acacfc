"""Largest bisimulation of the Markov chain induced by a strategy.

The chain is never built.  Blocks are pseudo-antichains, the initial
partition groups states by the cost of their strategy action, and blocks are
refined with :func:`split` until every block has a single probability of
moving into every other block.

For shortest-path problems the goal set is treated as absorbing with cost 0:
it forms one block that is never split, matching the truncation of the cost
sum at the first goal visit.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .mdp import MonotonicMdp, PaPartition, Strategy, pre_lambda, pre_sigma_tau
from .pseudo import PseudoAntichain, simplify

ZERO = Fraction(0)


def strategy_cost_partition(mdp: MonotonicMdp, strategy: Strategy) -> PaPartition:
    """Blocks of the strategy domain with equal cost of the chosen action."""
    parts = []
    for region, action in strategy.blocks:
        for D, c in mdp.cost_partition(action).blocks:
            parts.append((region & D, c))
    return PaPartition(mdp.lattice, parts, strategy._domain).merged()


def strategy_dist_partition(mdp: MonotonicMdp, strategy: Strategy) -> PaPartition:
    """Blocks with equal chosen distribution; payload is ``(action, probs)``.

    ``probs`` is aligned with ``mdp.effects(action)``.
    """
    parts = []
    for region, action in strategy.blocks:
        for D, dist in mdp.dist_partition(action).blocks:
            parts.append((region & D, (action, tuple(dist))))
    return PaPartition(mdp.lattice, parts, strategy._domain).merged()


def _strategy_actions(strategy: Strategy) -> list:
    seen = []
    for _, a in strategy.blocks:
        if a not in seen:
            seen.append(a)
    return seen


def splitter_pres(mdp: MonotonicMdp, C: PseudoAntichain, strategy: Strategy) -> dict:
    """``Pre_lambda(C, (action, effect))`` for every action used by the strategy."""
    pres = {}
    for action in _strategy_actions(strategy):
        for t in mdp.effects(action):
            pre = pre_lambda(mdp, C, action, t, strategy)
            if not pre.is_empty():
                pres[action, t] = pre
    return pres


def split(
    mdp: MonotonicMdp,
    B: PseudoAntichain,
    C: PseudoAntichain,
    strategy: Strategy,
    dist: PaPartition | None = None,
    pres: dict | None = None,
) -> list[tuple[Fraction, PseudoAntichain]]:
    """Partition ``B`` by the one-step probability of entering ``C``.

    Returns ``(probability, sub-block)`` pairs sorted by probability.  The
    effect alphabet is walked one symbol at a time; after symbol ``i`` the
    table maps each probability accumulated over the first ``i`` symbols to
    the states of ``B`` having it.
    """
    lat = mdp.lattice
    if dist is None:
        dist = strategy_dist_partition(mdp, strategy)
    if pres is None:
        pres = splitter_pres(mdp, C, strategy)
    table: dict[Fraction, PseudoAntichain] = {ZERO: B}
    for (action, t), pre in pres.items():
        idx = mdp.effects(action).index(t)
        new: dict[Fraction, list] = {}
        for p, block in table.items():
            hit = block & pre
            if hit.is_empty():
                new.setdefault(p, []).extend(block.elems)
                continue
            new.setdefault(p, []).extend((block - hit).elems)
            for D, (a, probs) in dist.blocks:
                if a != action:
                    continue
                part = hit & D
                if not part.is_empty():
                    new.setdefault(p + probs[idx], []).extend(part.elems)
        table = {}
        for p, pes in new.items():
            if pes:
                table[p] = PseudoAntichain(lat, simplify(pes, lat))
    return sorted(table.items(), key=lambda kv: kv[0])


def successor_partition(
    mdp: MonotonicMdp,
    W: PseudoAntichain,
    action,
    probs,
    targets: list[PseudoAntichain],
) -> list[tuple[PseudoAntichain, tuple]]:
    """Split ``W`` by the probability of entering each of ``targets`` under ``action``.

    ``targets`` must be disjoint and cover every successor of ``W``; then each
    effect sends a state into exactly one target and the parts are products
    of per-effect preimages, with no set difference involved.  Returns
    ``(part, vector)`` pairs, ``vector`` being sorted ``(target index,
    probability)`` items without zeros; parts with equal vectors are merged.
    """
    lat = mdp.lattice
    parts = [(W, {})]
    for idx, t in enumerate(mdp.effects(action)):
        p = probs[idx]
        if not p:
            continue
        new = []
        for part, vec in parts:
            for j, C in enumerate(targets):
                pre = pre_sigma_tau(mdp, C, action, t)
                if pre.is_empty():
                    continue
                inter = part & pre
                if inter.is_empty():
                    continue
                vec2 = dict(vec)
                vec2[j] = vec2.get(j, ZERO) + p
                new.append((inter, vec2))
        parts = new
    groups: dict = {}
    for part, vec in parts:
        groups.setdefault(tuple(sorted(vec.items())), []).extend(part.elems)
    return [(PseudoAntichain(lat, simplify(pes, lat)), key) for key, pes in groups.items()]


@dataclass
class LumpResult:
    """Quotient partition; payload is the block cost (0 for goal blocks)."""

    partition: PaPartition
    goal_mask: list
    representatives: list
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.partition)

    @property
    def blocks(self):
        return self.partition.blocks

    def block_of(self, s) -> int:
        return self.partition.index_of(s)


def lump(
    mdp: MonotonicMdp,
    strategy: Strategy,
    goal: PseudoAntichain | None = None,
    check: bool = False,
    method: str = "sweep",
) -> LumpResult:
    """Largest bisimulation of the chain induced by ``strategy`` on its domain.

    ``method`` picks the refinement loop: ``"sweep"`` refines all blocks in
    rounds with :func:`successor_partition`, ``"worklist"`` processes one
    splitter at a time with :func:`split`.  Both reach the same partition.
    """
    if method == "sweep":
        result = _lump_sweep(mdp, strategy, goal)
    elif method == "worklist":
        result = _lump_worklist(mdp, strategy, goal)
    else:
        raise ValueError(f"unknown lumping method {method!r}")
    if check and not is_stable(mdp, strategy, result, goal):
        raise AssertionError("lumping result is not stable")
    return result


def _initial_blocks(mdp, strategy, goal):
    """``(work strategy, [(region, cost, is_goal)])``: goal block first, then cost blocks."""
    domain = strategy.domain
    blocks = []
    work = strategy
    if goal is not None:
        goal_part = domain & goal
        if not goal_part.is_empty():
            blocks.append((goal_part, ZERO, True))
            work = strategy.restrict(domain - goal)
    for region, cost in strategy_cost_partition(mdp, work).blocks:
        blocks.append((region, cost, False))
    return work, blocks


def _result(lat, domain, blocks, stats) -> LumpResult:
    partition = PaPartition(lat, [(r, c) for r, c, _ in blocks], domain)
    return LumpResult(partition, [g for _, _, g in blocks], [r.pick() for r, _, _ in blocks], stats)


def _lump_sweep(mdp, strategy, goal) -> LumpResult:
    """Round-based refinement.

    The first round splits every block by its successor-block probabilities.
    Later rounds only need the blocks created in the previous round as
    targets (plus the union of the untouched ones), and only blocks that can
    reach a new block are examined.
    """
    lat = mdp.lattice
    work, blocks = _initial_blocks(mdp, strategy, goal)
    dist = strategy_dist_partition(mdp, work).blocks
    actions = _strategy_actions(work)
    fresh = list(range(len(blocks)))
    rounds = n_splits = 0
    while fresh:
        rounds += 1
        fresh_set = set(fresh)
        targets = [blocks[i][0] for i in fresh]
        rest = [blocks[i][0] for i in range(len(blocks)) if i not in fresh_set]
        if rest:
            targets.append(PseudoAntichain(lat, simplify([pe for r in rest for pe in r.elems], lat)))
        reach = None
        if rounds > 1:
            pes = []
            for C in targets[: len(fresh)]:
                for a in actions:
                    for t in mdp.effects(a):
                        pes.extend(pre_sigma_tau(mdp, C, a, t).elems)
            reach = PseudoAntichain(lat, simplify(pes, lat))
        new_blocks, fresh = [], []
        for region, cost, is_goal in blocks:
            if is_goal or (reach is not None and region.isdisjoint(reach)):
                new_blocks.append((region, cost, is_goal))
                continue
            groups: dict = {}
            for D, (a, probs) in dist:
                W = region & D
                if W.is_empty():
                    continue
                for part, key in successor_partition(mdp, W, a, probs, targets):
                    groups.setdefault(key, []).extend(part.elems)
            if len(groups) <= 1:
                new_blocks.append((region, cost, is_goal))
                continue
            n_splits += 1
            for pes in groups.values():
                fresh.append(len(new_blocks))
                new_blocks.append((PseudoAntichain(lat, simplify(pes, lat)), cost, False))
        blocks = new_blocks
    stats = {"blocks": len(blocks), "splits": n_splits, "rounds": rounds}
    return _result(lat, strategy.domain, blocks, stats)


def _lump_worklist(mdp, strategy, goal) -> LumpResult:
    """Splitters are processed from a worklist.

    Whenever a block splits, its parts are queued as new splitters.
    Stability against a block and all but one of its parts implies stability
    against the last part, but all parts are queued anyway to keep the loop
    simple.
    """
    lat = mdp.lattice
    domain = strategy.domain
    regions: dict[int, PseudoAntichain] = {}
    payload: dict[int, Fraction] = {}
    frozen: set[int] = set()
    order: list[int] = []

    def new_block(region, cost, is_goal=False):
        bid = len(regions)
        regions[bid] = region
        payload[bid] = cost
        order.append(bid)
        if is_goal:
            frozen.add(bid)
        return bid

    work, initial = _initial_blocks(mdp, strategy, goal)
    for region, cost, is_goal in initial:
        new_block(region, cost, is_goal)

    dist = strategy_dist_partition(mdp, work)
    alive = set(regions)
    queue = deque(order)
    n_splits = n_splitters = 0
    while queue:
        cid = queue.popleft()
        if cid not in alive:
            continue
        n_splitters += 1
        C = regions[cid]
        pres = splitter_pres(mdp, C, work)
        if not pres:
            continue
        reach = PseudoAntichain(lat, simplify([pe for pre in pres.values() for pe in pre.elems], lat))
        for bid in [b for b in order if b in alive and b not in frozen]:
            B = regions[bid]
            if B.isdisjoint(reach):
                continue
            parts = split(mdp, B, C, work, dist, pres)
            if len(parts) <= 1:
                continue
            n_splits += 1
            alive.discard(bid)
            cost = payload[bid]
            for _, part in parts:
                nid = new_block(part, cost)
                alive.add(nid)
                queue.append(nid)

    ids = [b for b in order if b in alive]
    stats = {"blocks": len(ids), "splits": n_splits, "splitters": n_splitters}
    return _result(lat, domain, [(regions[b], payload[b], b in frozen) for b in ids], stats)


def is_stable(mdp: MonotonicMdp, strategy: Strategy, result: LumpResult, goal=None) -> bool:
    """Every non-goal block has one probability of entering every block."""
    work = strategy
    if goal is not None:
        work = strategy.restrict(strategy.domain - goal)
    dist = strategy_dist_partition(mdp, work)
    for C, _ in result.partition.blocks:
        pres = splitter_pres(mdp, C, work)
        for (B, _), is_goal in zip(result.partition.blocks, result.goal_mask):
            if is_goal:
                continue
            if len(split(mdp, B, C, work, dist, pres)) > 1:
                return False
    return True
