"""Explicit quotient chain and its linear systems."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .linalg import SingularSystemError, solve
from .lumping import LumpResult
from .mdp import MonotonicMdp, Strategy
from .pseudo import PseudoAntichain


class QuotientError(ValueError):
    pass


@dataclass
class QuotientMc:
    """Sparse rational chain over lumped blocks.

    Goal blocks are absorbing with cost 0.  ``P[i]`` maps successor block
    indices to probabilities.
    """

    n: int
    P: list
    c: list
    goal_mask: list
    block_map: list

    def row_sums(self) -> list:
        return [sum(r.values(), Fraction(0)) for r in self.P]

    def format(self) -> str:
        lines = [f"blocks={self.n}"]
        for i in range(self.n):
            row = " ".join(f"{j}:{p}" for j, p in sorted(self.P[i].items()))
            tag = " goal" if self.goal_mask[i] else ""
            lines.append(f"{i}{tag} cost={self.c[i]} -> {row}")
        return "\n".join(lines)


def build_quotient(
    mdp: MonotonicMdp,
    lumped: LumpResult,
    strategy: Strategy,
    goal: PseudoAntichain | None = None,
) -> QuotientMc:
    """One representative per block gives that block's row."""
    n = len(lumped)
    P, c = [], []
    for i, ((region, cost), rep, is_goal) in enumerate(
        zip(lumped.partition.blocks, lumped.representatives, lumped.goal_mask)
    ):
        if goal is not None and not is_goal and not region.isdisjoint(goal):
            raise QuotientError(f"block {i} mixes goal and non-goal states")
        if is_goal:
            P.append({i: Fraction(1)})
            c.append(Fraction(0))
            continue
        action = strategy.lookup(rep)
        if action is None:
            raise QuotientError(f"representative of block {i} has no strategy action")
        row: dict[int, Fraction] = {}
        for t in mdp.effects(action):
            succ = mdp.successor(rep, action, t)
            j = lumped.block_of(succ)
            if j < 0:
                raise QuotientError(f"block {i} leaves the lumped domain")
            row[j] = row.get(j, Fraction(0)) + mdp.prob(action, t, rep)
        P.append(row)
        c.append(Fraction(mdp.cost(action, rep)))
    return QuotientMc(n, P, c, list(lumped.goal_mask), [r for r, _ in lumped.partition.blocks])


def solve_ssp_values(q: QuotientMc, exact: bool = True) -> list:
    """Expected cost to the goal blocks: ``v = c + P v`` off the goal, 0 on it."""
    idx = [i for i in range(q.n) if not q.goal_mask[i]]
    pos = {i: k for k, i in enumerate(idx)}
    rows, rhs = [], []
    for i in idx:
        row = {pos[i]: Fraction(1)}
        for j, p in q.P[i].items():
            if j in pos:
                row[pos[j]] = row.get(pos[j], 0) - p
        rows.append(row)
        rhs.append(q.c[i])
    sol = solve(rows, rhs, exact)
    zero = Fraction(0) if exact else 0.0
    v = [zero] * q.n
    for i, x in zip(idx, sol):
        v[i] = x
    return v


def recurrent_classes(q: QuotientMc) -> tuple[list[list[int]], list[int]]:
    """Bottom strongly connected components and the transient indices."""
    n = q.n
    rows, cols = [], []
    for i, r in enumerate(q.P):
        for j, p in r.items():
            if p:
                rows.append(i)
                cols.append(j)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")
    leaves = {}
    for i in range(n):
        leaves.setdefault(int(labels[i]), []).append(i)
    bottom = set()
    for lab, members in leaves.items():
        if all(int(labels[j]) == lab for i in members for j, p in q.P[i].items() if p):
            bottom.add(lab)
    classes = sorted((leaves[lab] for lab in bottom), key=lambda m: m[0])
    transient = [i for i in range(n) if int(labels[i]) not in bottom]
    return classes, transient


def solve_gain_bias(q: QuotientMc, exact: bool = True) -> tuple[list, list]:
    """Multichain evaluation: ``g = P g`` and ``g + b = c + P b``.

    The bias is pinned to 0 at the first block of every recurrent class.
    """
    num = Fraction if exact else float
    g = [num(0)] * q.n
    b = [num(0)] * q.n
    classes, transient = recurrent_classes(q)
    for members in classes:
        ref = members[0]
        # unknowns: gain (column 0) and the bias of every non-reference block
        col = {i: k + 1 for k, i in enumerate(m for m in members if m != ref)}
        rows, rhs = [], []
        for i in members:
            row = {0: num(1)}
            if i != ref:
                row[col[i]] = num(1)
            for j, p in q.P[i].items():
                if j != ref:
                    row[col[j]] = row.get(col[j], 0) - num(p)
            rows.append(row)
            rhs.append(num(q.c[i]))
        sol = solve(rows, rhs, exact)
        for i in members:
            g[i] = sol[0]
            b[i] = sol[col[i]] if i != ref else num(0)
    if transient:
        pos = {i: k for k, i in enumerate(transient)}
        rows, rhs_g = [], []
        for i in transient:
            row = {pos[i]: num(1)}
            acc = num(0)
            for j, p in q.P[i].items():
                if j in pos:
                    row[pos[j]] = row.get(pos[j], 0) - num(p)
                else:
                    acc += num(p) * g[j]
            rows.append(row)
            rhs_g.append(acc)
        gt = solve(rows, rhs_g, exact)
        for i, x in zip(transient, gt):
            g[i] = x
        rhs_b = []
        for i in transient:
            acc = num(q.c[i]) - g[i]
            for j, p in q.P[i].items():
                if j not in pos:
                    acc += num(p) * b[j]
            rhs_b.append(acc)
        bt = solve(rows, rhs_b, exact)
        for i, x in zip(transient, bt):
            b[i] = x
    return g, b


def ssp_residual(q: QuotientMc, v: list) -> list:
    """``c + (P - I) v`` on non-goal blocks."""
    out = []
    for i in range(q.n):
        if q.goal_mask[i]:
            continue
        out.append(q.c[i] + sum(p * v[j] for j, p in q.P[i].items()) - v[i])
    return out


def emp_residuals(q: QuotientMc, g: list, b: list) -> tuple[list, list]:
    """``P g - g`` and ``c + P b - g - b`` per block."""
    r1 = [sum(p * g[j] for j, p in q.P[i].items()) - g[i] for i in range(q.n)]
    r2 = [q.c[i] + sum(p * b[j] for j, p in q.P[i].items()) - g[i] - b[i] for i in range(q.n)]
    return r1, r2


__all__ = [
    "QuotientMc",
    "QuotientError",
    "SingularSystemError",
    "build_quotient",
    "solve_ssp_values",
    "solve_gain_bias",
    "recurrent_classes",
    "ssp_residual",
    "emp_residuals",
]
