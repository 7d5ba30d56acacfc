"""Enumerative baseline: explicit MDPs, strategy iteration and lumping.

Everything here works on enumerated states with plain dictionaries and exact
rationals.  It exists to cross-check the symbolic solvers on small instances
and shares no numerical code with them.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lattice import CapabilityError
from .mdp import MonotonicMdp, PaPartition
from .pseudo import PseudoAntichain, PseudoElement


class StateCapError(RuntimeError):
    """The state space is larger than the configured cap."""


@dataclass
class ExplicitMdp:
    states: list
    index: dict
    actions: list            # global action order
    enabled: list            # per state: enabled actions in order
    trans: dict              # (i, a) -> {j: p}
    cost: dict               # (i, a) -> Fraction
    goal: list               # per state: bool
    names: dict

    def __len__(self):
        return len(self.states)


def enumerate_states(mdp: MonotonicMdp, cap: int = 1 << 12) -> ExplicitMdp:
    """Enumerate ``S`` and tabulate the transition structure."""
    lat = mdp.lattice
    if not getattr(lat, "enumerable", False):
        raise CapabilityError("lattice cannot be enumerated")
    if lat.size() > cap:
        raise StateCapError(f"{lat.size()} lattice elements exceed the cap of {cap}")
    S = mdp.states_pa()
    G = mdp.goal_pa()
    states = sorted((s for s in lat.elements() if s in S), key=lat.key)
    index = {s: i for i, s in enumerate(states)}
    actions = list(mdp.actions())
    enabled, trans, cost = [], {}, {}
    for i, s in enumerate(states):
        here = []
        for a in actions:
            if not mdp.enabled(s, a):
                continue
            here.append(a)
            row: dict[int, Fraction] = {}
            for t in mdp.effects(a):
                j = index[mdp.successor(s, a, t)]
                row[j] = row.get(j, Fraction(0)) + Fraction(mdp.prob(a, t, s))
            if sum(row.values()) != 1:
                raise ValueError(f"distribution of {mdp.action_name(a)} at {lat.format(s)} does not sum to 1")
            trans[i, a] = row
            cost[i, a] = Fraction(mdp.cost(a, s))
        enabled.append(here)
    goal = [G is not None and s in G for s in states]
    names = {a: mdp.action_name(a) for a in actions}
    return ExplicitMdp(states, index, actions, enabled, trans, cost, goal, names)


# -- dense exact solves ------------------------------------------------------

def _gauss(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(b)
    M = [row[:] + [rhs] for row, rhs in zip(A, b)]
    for k in range(n):
        piv = next((r for r in range(k, n) if M[r][k] != 0), None)
        if piv is None:
            raise ArithmeticError("singular system")
        M[k], M[piv] = M[piv], M[k]
        inv = 1 / M[k][k]
        M[k] = [v * inv for v in M[k]]
        for r in range(n):
            if r != k and M[r][k] != 0:
                f = M[r][k]
                M[r] = [x - f * y for x, y in zip(M[r], M[k])]
    return [M[r][n] for r in range(n)]


def _reach(e: ExplicitMdp, strategy: dict, i: int) -> set:
    seen = {i}
    stack = [i]
    while stack:
        u = stack.pop()
        for v in e.trans[u, strategy[u]]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


# -- shortest path -----------------------------------------------------------

def explicit_proper_states(e: ExplicitMdp) -> set:
    """Almost-sure reachability of the goal by the nested fixpoint on sets."""
    n = len(e)
    G = {i for i in range(n) if e.goal[i]}
    Y = set(range(n))
    while True:
        X = set(G)
        while True:
            new = set(G)
            for i in range(n):
                for a in e.enabled[i]:
                    row = e.trans[i, a]
                    if all(j in Y for j in row) and any(j in X for j in row):
                        new.add(i)
                        break
            if new <= X:
                break
            X |= new
        if X == Y:
            return Y
        Y = X


def _evaluate_ssp(e: ExplicitMdp, strategy: dict, region: set) -> dict:
    free = sorted(i for i in region if not e.goal[i])
    pos = {i: k for k, i in enumerate(free)}
    A = [[Fraction(0)] * len(free) for _ in free]
    b = []
    for i in free:
        k = pos[i]
        A[k][k] += 1
        for j, p in e.trans[i, strategy[i]].items():
            if j in pos:
                A[k][pos[j]] -= p
        b.append(e.cost[i, strategy[i]])
    sol = _gauss(A, b) if free else []
    v = {i: Fraction(0) for i in region}
    v.update(zip(free, sol))
    return v


def evaluate_ssp(e: ExplicitMdp, strategy: dict) -> dict:
    """Expected cost to the goal for a proper strategy defined on its keys."""
    return _evaluate_ssp(e, strategy, set(strategy))


def explicit_ssp_oracle(e: ExplicitMdp) -> tuple[dict, dict]:
    """Per-state strategy iteration from a proper strategy; returns ``(strategy, values)``."""
    SP = explicit_proper_states(e)
    if not SP:
        raise ValueError("no proper state")
    allowed = {i: [a for a in e.enabled[i] if all(j in SP for j in e.trans[i, a])] for i in SP}
    # initial proper strategy: first action making progress toward the attractor
    strategy = {}
    reached = {i for i in SP if e.goal[i]}
    for i in reached:
        strategy[i] = e.enabled[i][0]
    while len(reached) < len(SP):
        layer = {}
        for i in SP - reached:
            for a in allowed[i]:
                if any(j in reached for j in e.trans[i, a]):
                    layer[i] = a
                    break
        if not layer:
            raise AssertionError("proper states not attractable")
        strategy.update(layer)
        reached |= set(layer)
    while True:
        v = _evaluate_ssp(e, strategy, SP)
        changed = False
        new = dict(strategy)
        for i in SP:
            if e.goal[i]:
                continue
            best, best_l = strategy[i], v[i]
            for a in allowed[i]:
                l = e.cost[i, a] + sum(p * v[j] for j, p in e.trans[i, a].items())
                if l < best_l:
                    best, best_l = a, l
            if best != strategy[i]:
                new[i] = best
                changed = True
        if not changed:
            return strategy, v
        strategy = new


# -- mean payoff -------------------------------------------------------------

def evaluate_emp(e: ExplicitMdp, strategy: dict) -> tuple[dict, dict]:
    """Gain and bias via stationary distributions; bias has zero mean per recurrent class."""
    n = len(e)
    reach = {i: _reach(e, strategy, i) for i in range(n)}
    recurrent = {i for i in range(n) if all(i in reach[j] for j in reach[i])}
    g, b = {}, {}
    done = set()
    for i in sorted(recurrent):
        if i in done:
            continue
        cls = sorted(reach[i])
        done |= set(cls)
        pos = {s: k for k, s in enumerate(cls)}
        m = len(cls)
        # stationary distribution: pi (P - I) = 0 with one equation replaced by sum(pi) = 1
        A = [[Fraction(0)] * m for _ in range(m)]
        for s in cls:
            for t, p in e.trans[s, strategy[s]].items():
                A[pos[t]][pos[s]] += p
            A[pos[s]][pos[s]] -= 1
        A[0] = [Fraction(1)] * m
        rhs = [Fraction(0)] * m
        rhs[0] = Fraction(1)
        pi = _gauss(A, rhs)
        gain = sum(pi[pos[s]] * e.cost[s, strategy[s]] for s in cls)
        # bias: (I - P) b = c - gain, with pi . b = 0 replacing the first row
        B = [[Fraction(0)] * m for _ in range(m)]
        rb = []
        for s in cls:
            B[pos[s]][pos[s]] += 1
            for t, p in e.trans[s, strategy[s]].items():
                B[pos[s]][pos[t]] -= p
            rb.append(e.cost[s, strategy[s]] - gain)
        B[0] = list(pi)
        rb[0] = Fraction(0)
        bias = _gauss(B, rb)
        for s in cls:
            g[s] = gain
            b[s] = bias[pos[s]]
    trans_states = sorted(set(range(n)) - recurrent)
    if trans_states:
        pos = {s: k for k, s in enumerate(trans_states)}
        m = len(trans_states)
        A = [[Fraction(0)] * m for _ in range(m)]
        rg = []
        for s in trans_states:
            A[pos[s]][pos[s]] += 1
            acc = Fraction(0)
            for t, p in e.trans[s, strategy[s]].items():
                if t in pos:
                    A[pos[s]][pos[t]] -= p
                else:
                    acc += p * g[t]
            rg.append(acc)
        gt = _gauss(A, rg)
        for s in trans_states:
            g[s] = gt[pos[s]]
        rb = []
        for s in trans_states:
            acc = e.cost[s, strategy[s]] - g[s]
            for t, p in e.trans[s, strategy[s]].items():
                if t not in pos:
                    acc += p * b[t]
            rb.append(acc)
        bt = _gauss(A, rb)
        for s in trans_states:
            b[s] = bt[pos[s]]
    return g, b


def explicit_emp_oracle(e: ExplicitMdp) -> tuple[dict, dict]:
    """Howard-Veinott multichain iteration; returns ``(strategy, gains)``."""
    n = len(e)
    strategy = {i: e.enabled[i][0] for i in range(n)}
    while True:
        g, b = evaluate_emp(e, strategy)
        new = dict(strategy)
        changed = False
        for i in range(n):
            cur_q = g[i]
            for a in e.enabled[i]:
                q = sum(p * g[j] for j, p in e.trans[i, a].items())
                if q < cur_q:
                    new[i], cur_q = a, q
            changed |= new[i] != strategy[i]
        if not changed:
            for i in range(n):
                cur_r = b[i]
                for a in e.enabled[i]:
                    row = e.trans[i, a]
                    if sum(p * g[j] for j, p in row.items()) != g[i]:
                        continue
                    r = e.cost[i, a] - g[i] + sum(p * b[j] for j, p in row.items())
                    if r < cur_r:
                        new[i], cur_r = a, r
                changed |= new[i] != strategy[i]
        if not changed:
            return strategy, g
        strategy = new


# -- lumping -----------------------------------------------------------------

def explicit_lump_oracle(e: ExplicitMdp, strategy: dict, absorbing_goal: bool = True) -> list[frozenset]:
    """Coarsest cost- and probability-stable partition of the strategy's domain.

    Goal states are absorbing with cost 0 when ``absorbing_goal`` is set.
    Returns blocks as sets of lattice elements.
    """
    dom = sorted(strategy)

    def step(i):
        if absorbing_goal and e.goal[i]:
            return Fraction(0), {i: Fraction(1)}
        return e.cost[i, strategy[i]], e.trans[i, strategy[i]]

    info = {i: step(i) for i in dom}
    label = {i: (absorbing_goal and e.goal[i], info[i][0]) for i in dom}
    while True:
        sig = {}
        for i in dom:
            acc: dict = {}
            for j, p in info[i][1].items():
                acc[label[j]] = acc.get(label[j], Fraction(0)) + p
            sig[i] = (label[i], tuple(sorted(acc.items(), key=repr)))
        ids = {}
        new = {i: ids.setdefault(sig[i], len(ids)) for i in dom}
        if len(ids) == len(set(label.values())):
            break
        label = new
    blocks: dict = {}
    for i in dom:
        blocks.setdefault(label[i], set()).add(e.states[i])
    return [frozenset(bl) for bl in blocks.values()]


# -- conversions -------------------------------------------------------------

def singleton_pa(lat, s) -> PseudoAntichain:
    """``{s}`` as a pseudo-antichain (needs an enumerable lattice)."""
    below = [t for t in lat.elements() if t != s and lat.leq(t, s)]
    return PseudoAntichain(lat, (PseudoElement(s, lat.maximal(below)),))


def strategy_to_dict(e: ExplicitMdp, strategy: PaPartition) -> dict:
    out = {}
    for i, s in enumerate(e.states):
        a = strategy.lookup(s)
        if a is not None:
            out[i] = a
    return out


def dict_to_strategy(mdp: MonotonicMdp, e: ExplicitMdp, strategy: dict) -> PaPartition:
    """Symbolic strategy with one singleton block per state, merged by action."""
    lat = mdp.lattice
    blocks = [(singleton_pa(lat, e.states[i]), a) for i, a in strategy.items()]
    return PaPartition(lat, blocks).merged()
