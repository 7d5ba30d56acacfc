"""Symbolic strategy iteration for shortest-path and mean-payoff objectives.

Each round lumps the chain of the current strategy symbolically, solves the
small quotient exactly, and improves the strategy block-wise.  Only the
quotient is ever explicit.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .lumping import LumpResult, lump, successor_partition
from .mdp import (
    MonotonicMdp,
    PaPartition,
    Strategy,
    allow_region,
    enabled_region,
    exists_pre,
    strategies_equal,
)
from .pseudo import PseudoAntichain, simplify
from .quotient import QuotientMc, build_quotient, solve_gain_bias, solve_ssp_values

log = logging.getLogger(__name__)


class NoProperStateError(ValueError):
    """The requested start states cannot reach the goal almost surely."""


class IterationLimitError(RuntimeError):
    pass


@dataclass
class SolveReport:
    objective: str
    strategy: Strategy
    value_partition: PaPartition
    iterations: int
    max_quotient_blocks: int
    timings: dict
    lumped: LumpResult
    quotient: QuotientMc
    proper: PseudoAntichain | None = None
    history: list = field(default_factory=list)

    def block_value(self, s):
        """Payload of the final block containing ``s`` (``v``, or ``(g, b)``)."""
        return self.value_partition.lookup(s)

    def value_at(self, s):
        """``v(s)`` for shortest path, the gain ``g(s)`` for mean payoff."""
        val = self.block_value(s)
        if val is None:
            return None
        return val[0] if self.objective == "emp" else val


# -- proper states -----------------------------------------------------------

def _attractor_layers(mdp: MonotonicMdp, goal: PseudoAntichain, Y: PseudoAntichain):
    """Least fixpoint of positive-probability progress toward ``goal`` inside ``Y``.

    Returns the fixpoint, its layers (layer 0 is the goal) and the per-action
    regions keeping all successors inside ``Y``.
    """
    allow = {a: allow_region(mdp, a, Y) for a in mdp.actions()}
    X = goal
    layers = [goal]
    while True:
        pes = list(goal.elems)
        for a in mdp.actions():
            if allow[a].is_empty():
                continue
            pes.extend((allow[a] & exists_pre(mdp, a, X)).elems)
        new = PseudoAntichain(mdp.lattice, simplify(pes, mdp.lattice))
        fresh = new - X
        if fresh.is_empty():
            return X, layers, allow
        layers.append(fresh)
        X = X | fresh


def proper_states(mdp: MonotonicMdp) -> PseudoAntichain:
    """States from which some strategy reaches the goal with probability 1."""
    goal = mdp.goal_pa()
    if goal is None or goal.is_empty():
        raise ValueError("proper states need a nonempty goal set")
    S = mdp.states_pa()
    goal = goal & S
    Y = S
    while True:
        X, _, _ = _attractor_layers(mdp, goal, Y)
        if (Y - X).is_empty():
            return X
        Y = X


def initial_proper_strategy(mdp: MonotonicMdp, proper: PseudoAntichain) -> Strategy:
    """A strategy on ``proper`` reaching the goal with probability 1.

    Each attractor layer plays the first action (in action order) that keeps
    every successor proper and moves to an earlier layer with positive
    probability.  Goal states play their first enabled action.
    """
    lat = mdp.lattice
    goal = mdp.goal_pa() & proper
    _, layers, allow = _attractor_layers(mdp, goal, proper)
    blocks = []
    reach = layers[0]
    for layer in layers[1:]:
        remaining = layer
        for a in mdp.actions():
            if remaining.is_empty():
                break
            if allow[a].is_empty():
                continue
            W = remaining & allow[a]
            if W.is_empty():
                continue
            W = W & exists_pre(mdp, a, reach)
            if not W.is_empty():
                blocks.append((W, a))
                remaining = remaining - W
        if not remaining.is_empty():
            raise AssertionError("attractor layer without a progress action")
        reach = reach | layer
    remaining = goal
    for a in mdp.actions():
        if remaining.is_empty():
            break
        W = remaining & enabled_region(mdp, a)
        if not W.is_empty():
            blocks.append((W, a))
            remaining = remaining - W
    return PaPartition(lat, blocks, proper).merged()


def initial_strategy(mdp: MonotonicMdp) -> Strategy:
    """First enabled action everywhere (mean-payoff starting point)."""
    remaining = mdp.states_pa()
    blocks = []
    for a in mdp.actions():
        if remaining.is_empty():
            break
        W = remaining & enabled_region(mdp, a)
        if not W.is_empty():
            blocks.append((W, a))
            remaining = remaining - W
    if not remaining.is_empty():
        raise ValueError("the MDP is blocking: some states enable no action")
    return PaPartition(mdp.lattice, blocks, mdp.states_pa())


# -- one-step values per action ---------------------------------------------

def action_value_blocks(
    mdp: MonotonicMdp, action, lumped: LumpResult, region: PseudoAntichain
) -> list[tuple[int, PseudoAntichain, tuple, object]]:
    """Parts of ``S_action & region`` on which one step of ``action`` looks the same.

    Returns ``(j, part, vector, cost)`` tuples: ``part`` lies in quotient
    block ``j``, pays ``cost`` and enters each quotient block with the
    probabilities listed in ``vector``.  Parts come from
    :func:`successor_partition`, so no set difference is needed.
    """
    work = enabled_region(mdp, action) & region
    if work.is_empty():
        return []
    targets = [C for C, _ in lumped.partition.blocks]
    out = []
    for Dc, c in mdp.cost_partition(action).blocks:
        Wc = work & Dc
        if Wc.is_empty():
            continue
        for Dd, probs in mdp.dist_partition(action).blocks:
            W0 = Wc & Dd
            if W0.is_empty():
                continue
            for j, C in enumerate(targets):
                W = W0 & C
                if W.is_empty():
                    continue
                for part, vec in successor_partition(mdp, W, action, probs, targets):
                    out.append((j, part, vec, c))
    return out


def _expect(vec, values, zero):
    return sum((p * values[k] for k, p in vec), zero)


def compute_lsigma(
    mdp: MonotonicMdp,
    action,
    lumped: LumpResult,
    values,
    region: PseudoAntichain,
    include_cost: bool = True,
) -> PaPartition:
    """``C(s, action) + sum_C P(s, action, C) * values[C]`` as a partition of ``S_action & region``."""
    zero = values[0] * 0 if values else 0
    out = []
    for _, part, vec, c in action_value_blocks(mdp, action, lumped, region):
        val = _expect(vec, values, zero)
        out.append((part, val + c if include_cost else val))
    return PaPartition(mdp.lattice, out).merged()


def apply_improvements(strategy: Strategy, entries: list) -> Strategy:
    """Reassign regions in list order; later entries overwrite earlier ones.

    ``entries`` holds ``(region, action)`` pairs, already sorted by
    decreasing one-step value.
    """
    blocks = list(strategy.blocks)
    for C, action in entries:
        new = []
        for B, a in blocks:
            inter = B & C
            if inter.is_empty():
                new.append((B, a))
                continue
            new.append((inter, action))
            rest = B - C
            if not rest.is_empty():
                new.append((rest, a))
        blocks = new
    return PaPartition(strategy.lattice, blocks, strategy._domain).merged()


def _sorted_entries(raw: list, actions, lat) -> list:
    """Order candidate reassignments for :func:`apply_improvements`.

    ``raw`` holds ``(value, region, action)``; regions sharing value and
    action are merged, then entries are sorted by decreasing value, action
    order and first appearance.
    """
    rank = {a: i for i, a in enumerate(actions)}
    groups: dict = {}
    for val, region, a in raw:
        groups.setdefault((val, a), []).extend(region.elems)
    keys = sorted(enumerate(groups), key=lambda it: (-it[1][0], rank[it[1][1]], it[0]))
    return [(PseudoAntichain(lat, simplify(groups[k], lat)), k[1]) for _, k in keys]


def _improves(new, old, tol) -> bool:
    return new < old - tol if tol else new < old


def improve_strategy_ssp(
    mdp: MonotonicMdp,
    strategy: Strategy,
    lumped: LumpResult,
    v: list,
    proper: PseudoAntichain,
    tol: float = 0,
) -> tuple[Strategy, bool]:
    """One block-wise improvement step restricted to actions keeping ``proper``."""
    free = proper - mdp.goal_pa()
    zero = v[0] * 0
    raw = []
    for a in mdp.actions():
        region = free & allow_region(mdp, a, proper)
        if region.is_empty():
            continue
        for j, part, vec, c in action_value_blocks(mdp, a, lumped, region):
            l = c + _expect(vec, v, zero)
            if _improves(l, v[j], tol):
                raw.append((l, part, a))
    if not raw:
        return strategy, False
    entries = _sorted_entries(raw, mdp.actions(), mdp.lattice)
    return apply_improvements(strategy, entries), True


def emp_action_values(mdp: MonotonicMdp, action, lumped: LumpResult, g: list, b: list, region):
    """``(j, part, q, r)`` with ``q = P g`` and ``r = C + P b`` on each part."""
    zero = g[0] * 0
    return [
        (j, part, _expect(vec, g, zero), c + _expect(vec, b, zero))
        for j, part, vec, c in action_value_blocks(mdp, action, lumped, region)
    ]


def improve_strategy_emp(
    mdp: MonotonicMdp,
    strategy: Strategy,
    lumped: LumpResult,
    g: list,
    b: list,
    tol: float = 0,
) -> tuple[Strategy, bool, int]:
    """Gain improvement first; bias improvement among gain-optimal actions otherwise.

    Returns the new strategy, whether it changed, and the stage (1 or 2) that
    produced the change (0 when unchanged).
    """
    domain = strategy.domain
    per_action = {}
    stage1 = []
    lat = mdp.lattice
    for a in mdp.actions():
        vals = emp_action_values(mdp, a, lumped, g, b, domain)
        per_action[a] = vals
        for j, part, q, _ in vals:
            if _improves(q, g[j], tol):
                stage1.append((q, part, a))
    if stage1:
        return apply_improvements(strategy, _sorted_entries(stage1, mdp.actions(), lat)), True, 1
    stage2 = []
    for a, vals in per_action.items():
        for j, part, q, r in vals:
            if abs(q - g[j]) <= tol and _improves(r - g[j], b[j], tol):
                stage2.append((r - g[j], part, a))
    if stage2:
        return apply_improvements(strategy, _sorted_entries(stage2, mdp.actions(), lat)), True, 2
    return strategy, False, 0


# -- drivers -----------------------------------------------------------------

def _value_partition(lumped: LumpResult, values) -> PaPartition:
    return PaPartition(
        lumped.partition.lattice,
        [(r, val) for (r, _), val in zip(lumped.partition.blocks, values)],
        lumped.partition._domain,
    )


def solve_ssp(
    mdp: MonotonicMdp,
    start=None,
    exact: bool = True,
    max_iterations: int = 1000,
    check: bool = False,
) -> SolveReport:
    """Optimal proper strategy and expected cost to the goal.

    ``start`` defaults to the model's initial state; it must be proper.
    """
    t0 = time.perf_counter()
    goal = mdp.goal_pa()
    if goal is None or goal.is_empty():
        raise ValueError("shortest path needs a nonempty goal set")
    proper = proper_states(mdp)
    if start is None:
        start = mdp.initial_state()
    if proper.is_empty() or (start is not None and start not in proper):
        raise NoProperStateError("no proper state in the requested start region")
    strategy = initial_proper_strategy(mdp, proper)
    tol = 0 if exact else 1e-9
    timings = {"lump": 0.0, "solve": 0.0, "improve": 0.0}
    history = []
    max_blocks = 0
    n = 0
    while True:
        n += 1
        if n > max_iterations:
            raise IterationLimitError(f"no convergence after {max_iterations} iterations")
        t = time.perf_counter()
        lumped = lump(mdp, strategy, goal, check=check)
        timings["lump"] += time.perf_counter() - t
        t = time.perf_counter()
        q = build_quotient(mdp, lumped, strategy, goal)
        v = solve_ssp_values(q, exact)
        timings["solve"] += time.perf_counter() - t
        max_blocks = max(max_blocks, q.n)
        history.append({"blocks": q.n, "value": _start_value(lumped, v, start)})
        log.info("ssp iteration %d: %d blocks", n, q.n)
        t = time.perf_counter()
        new, changed = improve_strategy_ssp(mdp, strategy, lumped, v, proper, tol)
        timings["improve"] += time.perf_counter() - t
        if not changed or strategies_equal(new, strategy):
            break
        strategy = new
    timings["total"] = time.perf_counter() - t0
    return SolveReport("ssp", strategy, _value_partition(lumped, v), n, max_blocks,
                       timings, lumped, q, proper, history)


def solve_emp(
    mdp: MonotonicMdp,
    exact: bool = True,
    max_iterations: int = 1000,
    check: bool = False,
) -> SolveReport:
    """Gain-optimal (minimal long-run average cost) strategy on all states."""
    t0 = time.perf_counter()
    start = mdp.initial_state()
    strategy = initial_strategy(mdp)
    tol = 0 if exact else 1e-9
    timings = {"lump": 0.0, "solve": 0.0, "improve": 0.0}
    history = []
    max_blocks = 0
    n = 0
    while True:
        n += 1
        if n > max_iterations:
            raise IterationLimitError(f"no convergence after {max_iterations} iterations")
        t = time.perf_counter()
        lumped = lump(mdp, strategy, None, check=check)
        timings["lump"] += time.perf_counter() - t
        t = time.perf_counter()
        q = build_quotient(mdp, lumped, strategy)
        g, b = solve_gain_bias(q, exact)
        timings["solve"] += time.perf_counter() - t
        max_blocks = max(max_blocks, q.n)
        t = time.perf_counter()
        new, changed, stage = improve_strategy_emp(mdp, strategy, lumped, g, b, tol)
        timings["improve"] += time.perf_counter() - t
        history.append({"blocks": q.n, "value": _start_value(lumped, g, start), "stage": stage})
        log.info("emp iteration %d: %d blocks, stage %d", n, q.n, stage)
        if not changed or strategies_equal(new, strategy):
            break
        strategy = new
    timings["total"] = time.perf_counter() - t0
    return SolveReport("emp", strategy, _value_partition(lumped, list(zip(g, b))), n,
                       max_blocks, timings, lumped, q, None, history)


def _start_value(lumped, values, start):
    if start is None:
        return None
    j = lumped.block_of(start)
    return values[j] if j >= 0 else None


# -- optimality certificates -------------------------------------------------

def check_ssp_optimality(mdp: MonotonicMdp, report: SolveReport) -> list[str]:
    """Bellman conditions on the final quotient; returns violations (empty if optimal)."""
    lumped, proper, strategy = report.lumped, report.proper, report.strategy
    v = [val for _, val in report.value_partition.blocks]
    free = proper - mdp.goal_pa()
    problems = []
    for a in mdp.actions():
        region = free & allow_region(mdp, a, proper)
        if region.is_empty():
            continue
        chosen = strategy.region_of(a)
        name = mdp.action_name(a)
        for j, part, vec, c in action_value_blocks(mdp, a, lumped, region):
            l = c + _expect(vec, v, 0)
            if l < v[j]:
                problems.append(f"{name} improves block {j}: {l} < {v[j]}")
            if l != v[j] and not part.isdisjoint(chosen):
                problems.append(f"chosen {name} on block {j}: {l} != {v[j]}")
    return problems


def check_emp_optimality(mdp: MonotonicMdp, report: SolveReport) -> list[str]:
    """Gain and bias optimality conditions; returns violations (empty if optimal)."""
    lumped, strategy = report.lumped, report.strategy
    g = [gb[0] for _, gb in report.value_partition.blocks]
    b = [gb[1] for _, gb in report.value_partition.blocks]
    problems = []
    for a in mdp.actions():
        chosen = strategy.region_of(a)
        name = mdp.action_name(a)
        for j, part, q, r in emp_action_values(mdp, a, lumped, g, b, strategy.domain):
            if q < g[j] or (q == g[j] and r - g[j] < b[j]):
                problems.append(f"{name} improves block {j}")
            if (q != g[j] or r - g[j] != b[j]) and not part.isdisjoint(chosen):
                problems.append(f"chosen {name} inconsistent on block {j}")
    return problems
