"""Monotonic stochastic STRIPS problems and their monotonic MDPs.

File format (UTF-8, one statement per line, ``#`` starts a comment)::

    conditions: box stick bananas
    init:
    goal: bananas
    operator grab
      guard: stick
      cost: 1
      effect: 1/2 => add(bananas) del()
      effect: 1/2 => add() del(stick)

Rationals are written ``a/b`` or as integers.  Within a block the ``effect``
lines of an operator must have positive probabilities summing to 1.

States are subsets of the conditions ordered by *reverse* inclusion, so a
state with more true conditions is smaller.  Guards only require conditions
to hold, hence smaller states enable more operators, and the successor
``(s | add) - del`` is monotone.  The goal region ``{s : s >= goal}`` is the
closed set below the goal conditions.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import SupersetLattice
from .mdp import MonotonicMdp
from .pseudo import PseudoAntichain


class MssError(ValueError):
    """Malformed problem text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Effect:
    prob: Fraction
    add: frozenset = frozenset()
    delete: frozenset = frozenset()


@dataclass(frozen=True)
class Operator:
    name: str
    guard: frozenset
    cost: Fraction
    effects: tuple


@dataclass(frozen=True)
class MssProblem:
    conditions: tuple
    init: frozenset
    goal: frozenset
    operators: tuple = field(default=())

    def operator(self, name: str) -> Operator:
        for op in self.operators:
            if op.name == name:
                return op
        raise KeyError(name)


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*$")
_EFFECT = re.compile(r"^(?P<p>\S+)\s*=>\s*add\((?P<add>[^)]*)\)\s*del\((?P<del>[^)]*)\)\s*$")


def parse_rational(text: str, line: int | None = None) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise MssError(f"bad rational {text!r}", line)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise MssError(f"zero denominator in {text!r}", line) from None


def _names(text: str, line: int) -> list[str]:
    out = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    for t in out:
        if not _NAME.match(t):
            raise MssError(f"bad condition name {t!r}", line)
    return out


def parse_mss(text: str) -> MssProblem:
    conditions: list[str] | None = None
    init: list[tuple[str, int]] = []
    goal: list[tuple[str, int]] = []
    ops: list[dict] = []
    cur: dict | None = None
    seen_header = set()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0] in " \t"
        body = line.strip()
        if body.startswith("operator"):
            if indented:
                raise MssError("operator declarations must not be indented", lineno)
            parts = body.split()
            if parts[0] != "operator" or len(parts) != 2 or not _NAME.match(parts[1]):
                raise MssError("expected 'operator NAME'", lineno)
            if any(o["name"] == parts[1] for o in ops):
                raise MssError(f"duplicate operator {parts[1]!r}", lineno)
            cur = {"name": parts[1], "line": lineno, "guard": None, "cost": None, "effects": []}
            ops.append(cur)
            continue
        if ":" not in body:
            raise MssError(f"expected 'key: value', got {body!r}", lineno)
        key, value = (s.strip() for s in body.split(":", 1))
        if indented:
            if cur is None:
                raise MssError("indented line outside an operator", lineno)
            if key == "guard":
                if cur["guard"] is not None:
                    raise MssError("guard given twice", lineno)
                cur["guard"] = [(n, lineno) for n in _names(value, lineno)]
            elif key == "cost":
                if cur["cost"] is not None:
                    raise MssError("cost given twice", lineno)
                cur["cost"] = parse_rational(value, lineno)
            elif key == "effect":
                m = _EFFECT.match(value)
                if not m:
                    raise MssError("expected 'effect: P => add(...) del(...)'", lineno)
                p = parse_rational(m["p"], lineno)
                if p <= 0 or p > 1:
                    raise MssError(f"effect probability {p} outside (0, 1]", lineno)
                cur["effects"].append((p, [(n, lineno) for n in _names(m["add"], lineno)],
                                       [(n, lineno) for n in _names(m["del"], lineno)], lineno))
            else:
                raise MssError(f"unknown operator field {key!r}", lineno)
            continue
        cur = None
        if key in seen_header:
            raise MssError(f"{key!r} given twice", lineno)
        seen_header.add(key)
        if key == "conditions":
            conditions = _names(value, lineno)
            if not conditions:
                raise MssError("at least one condition required", lineno)
            if len(set(conditions)) != len(conditions):
                raise MssError("duplicate condition", lineno)
        elif key == "init":
            init = [(n, lineno) for n in _names(value, lineno)]
        elif key == "goal":
            goal = [(n, lineno) for n in _names(value, lineno)]
        else:
            raise MssError(f"unknown statement {key!r}", lineno)

    if conditions is None:
        raise MssError("missing 'conditions:' line")
    declared = set(conditions)

    def resolve(items):
        for name, ln in items:
            if name not in declared:
                raise MssError(f"undeclared condition {name!r}", ln)
        return frozenset(n for n, _ in items)

    operators = []
    for o in ops:
        if o["cost"] is None:
            raise MssError(f"operator {o['name']!r} has no cost", o["line"])
        if not o["effects"]:
            raise MssError(f"operator {o['name']!r} has no effect", o["line"])
        total = sum(p for p, *_ in o["effects"])
        if total != 1:
            raise MssError(f"effect probabilities of {o['name']!r} sum to {total}, expected 1", o["line"])
        effects = tuple(Effect(p, resolve(a), resolve(d)) for p, a, d, _ in o["effects"])
        operators.append(Operator(o["name"], resolve(o["guard"] or []), o["cost"], effects))
    return MssProblem(tuple(conditions), resolve(init), resolve(goal), tuple(operators))


def format_mss(problem: MssProblem) -> str:
    order = {c: i for i, c in enumerate(problem.conditions)}

    def names(s):
        return " ".join(sorted(s, key=order.__getitem__))

    lines = [
        f"conditions: {' '.join(problem.conditions)}",
        f"init: {names(problem.init)}".rstrip(),
        f"goal: {names(problem.goal)}".rstrip(),
    ]
    for op in problem.operators:
        lines.append(f"operator {op.name}")
        lines.append(f"  guard: {names(op.guard)}".rstrip())
        lines.append(f"  cost: {op.cost}")
        for e in op.effects:
            lines.append(f"  effect: {e.prob} => add({names(e.add)}) del({names(e.delete)})")
    return "\n".join(lines) + "\n"


def validate_mss(problem: MssProblem, mode: str = "ssp") -> list[str]:
    """Diagnostics for a parsed problem; empty when it is usable in ``mode``."""
    if mode not in ("ssp", "emp"):
        raise ValueError(f"unknown mode {mode!r}")
    diags = []
    declared = set(problem.conditions)
    for label, s in (("init", problem.init), ("goal", problem.goal)):
        if not s <= declared:
            diags.append(f"{label} uses undeclared conditions {sorted(s - declared)}")
    names = [op.name for op in problem.operators]
    if len(set(names)) != len(names):
        diags.append("operator names are not unique")
    for op in problem.operators:
        used = set(op.guard)
        for e in op.effects:
            used |= e.add | e.delete
            if e.prob <= 0:
                diags.append(f"operator {op.name}: non-positive effect probability {e.prob}")
        if not used <= declared:
            diags.append(f"operator {op.name}: undeclared conditions {sorted(used - declared)}")
        total = sum(e.prob for e in op.effects)
        if total != 1:
            diags.append(f"operator {op.name}: probabilities sum to {total}")
        if mode == "ssp" and op.cost <= 0:
            diags.append(f"operator {op.name}: cost {op.cost} must be positive for ssp")
    if mode == "ssp" and not problem.goal:
        diags.append("ssp needs a nonempty goal")
    return diags


STUTTER = "__stutter__"


class MssMdp(MonotonicMdp):
    """The monotonic MDP of an MSS problem over :class:`SupersetLattice`.

    Actions are operator indices.  When no operator has an empty guard the
    state without any true condition would be blocked, so an extra stutter
    action (empty guard, identity effect, cost 1) is appended.
    """

    def __init__(self, problem: MssProblem, negate_costs: bool = False):
        self.problem = problem
        lat = SupersetLattice(problem.conditions)
        self.lattice = lat
        ops = list(problem.operators)
        if not any(not op.guard for op in ops):
            ops.append(Operator(STUTTER, frozenset(), Fraction(1), (Effect(Fraction(1)),)))
        self.ops = ops
        self.has_stutter = ops[-1].name == STUTTER
        sign = -1 if negate_costs else 1
        self._guard = [lat.encode(op.guard) for op in ops]
        self._cost = [sign * Fraction(op.cost) for op in ops]
        self._add = [[lat.encode(e.add) for e in op.effects] for op in ops]
        self._del = [[lat.encode(e.delete) for e in op.effects] for op in ops]
        self._keep = [[lat.full & ~d for d in dels] for dels in self._del]
        self._prob = [[Fraction(e.prob) for e in op.effects] for op in ops]
        self._effects = [tuple(range(len(op.effects))) for op in ops]
        self._actions = tuple(range(len(ops)))

    def actions(self):
        return self._actions

    def effects(self, action):
        return self._effects[action]

    def action_name(self, action):
        return self.ops[action].name

    def successor(self, s, action, effect):
        return (s | self._add[action][effect]) & self._keep[action][effect]

    def prob(self, action, effect, s=None):
        return self._prob[action][effect]

    def cost(self, action, s=None):
        return self._cost[action]

    def enabled(self, s, action):
        g = self._guard[action]
        return s & g == g

    def pre_max(self, x, action, effect):
        if x & self._del[action][effect]:
            return frozenset()
        return frozenset(((x & ~self._add[action][effect]) | self._guard[action],))

    def states_pa(self):
        return PseudoAntichain.closed(self.lattice, [0])

    def goal_pa(self):
        return PseudoAntichain.closed(self.lattice, [self.lattice.encode(self.problem.goal)])

    def initial_state(self):
        return self.lattice.encode(self.problem.init)

    def guard_mask(self, action) -> int:
        return self._guard[action]


def mss_to_mdp(problem: MssProblem, negate_costs: bool = False) -> MssMdp:
    return MssMdp(problem, negate_costs)


# -- benchmark generators ----------------------------------------------------

def _op(name, guard=(), cost=1, effects=((1, (), ()),)) -> Operator:
    return Operator(
        name,
        frozenset(guard),
        Fraction(cost),
        tuple(Effect(Fraction(p), frozenset(a), frozenset(d)) for p, a, d in effects),
    )


def gen_monkey(p: int, s: int) -> MssProblem:
    """A monkey reaching bananas, with ``s`` sticks of ``p`` pieces each.

    Conditions: ``piece_i_j`` (piece ``j`` of stick ``i``), ``stick_i``
    (stick ``i`` assembled), ``box``, ``stone``, ``on_box`` and ``bananas``,
    i.e. ``p*s + s + 4`` conditions.  Pieces of stick ``i`` are found with
    probability ``(i+1)/(s+2)`` but stick ``i`` takes ``2*i`` time units to
    assemble, so sticks trade acquisition luck against building time.  The
    bananas are grabbed with a probability that grows with the items held:
    jumping 1/10, throwing a stone 1/4, poking with a stick 1/2, poking from
    the box 9/10.
    """
    if p < 1 or s < 1:
        raise ValueError("p and s must be at least 1")
    conds = []
    for i in range(1, s + 1):
        conds += [f"piece_{i}_{j}" for j in range(1, p + 1)]
    conds += [f"stick_{i}" for i in range(1, s + 1)]
    conds += ["box", "stone", "on_box", "bananas"]
    ops = []
    for i in range(1, s + 1):
        q = Fraction(i + 1, s + 2)
        for j in range(1, p + 1):
            ops.append(_op(f"get_piece_{i}_{j}", (), 1, ((q, [f"piece_{i}_{j}"], ()), (1 - q, (), ()))))
    for i in range(1, s + 1):
        pieces = [f"piece_{i}_{j}" for j in range(1, p + 1)]
        ops.append(_op(f"build_stick_{i}", pieces, 2 * i, ((1, [f"stick_{i}"], ()),)))
    ops.append(_op("get_box", (), 2, ((Fraction(1, 2), ["box"], ()), (Fraction(1, 2), (), ()))))
    ops.append(_op("get_stone", (), 1, ((Fraction(3, 4), ["stone"], ()), (Fraction(1, 4), (), ()))))
    ops.append(_op("climb_box", ["box"], 1, ((1, ["on_box"], ()),)))
    for i in range(1, s + 1):
        ops.append(_op(f"poke_box_{i}", [f"stick_{i}", "on_box"], 1,
                       ((Fraction(9, 10), ["bananas"], ()), (Fraction(1, 10), (), ["on_box"]))))
        ops.append(_op(f"poke_{i}", [f"stick_{i}"], 1,
                       ((Fraction(1, 2), ["bananas"], ()), (Fraction(1, 2), (), ()))))
    ops.append(_op("throw_stone", ["stone"], 1,
                   ((Fraction(1, 4), ["bananas"], ()), (Fraction(3, 4), (), ["stone"]))))
    ops.append(_op("jump", (), 1, ((Fraction(1, 10), ["bananas"], ()), (Fraction(9, 10), (), ()))))
    return MssProblem(tuple(conds), frozenset(), frozenset(["bananas"]), tuple(ops))


def gen_moats(d: int, c: int) -> MssProblem:
    """``c`` sand castles, each protected by a moat dug up to depth ``d``.

    Conditions: ``moat_k_j`` (moat ``k`` dug to depth ``j``) and
    ``castle_k``, i.e. ``c*(d+1)`` conditions.  Digging one level costs 1;
    building castle ``k`` costs 2 and survives the waves with probability
    ``(j+1)/(d+2)`` when its moat has depth ``j``.
    """
    if d < 1 or c < 1:
        raise ValueError("d and c must be at least 1")
    conds = []
    for k in range(1, c + 1):
        conds += [f"moat_{k}_{j}" for j in range(1, d + 1)]
        conds.append(f"castle_{k}")
    ops = []
    for k in range(1, c + 1):
        for j in range(1, d + 1):
            guard = [f"moat_{k}_{j - 1}"] if j > 1 else []
            ops.append(_op(f"dig_{k}_{j}", guard, 1, ((1, [f"moat_{k}_{j}"], ()),)))
        for j in range(0, d + 1):
            guard = [f"moat_{k}_{j}"] if j > 0 else []
            q = Fraction(j + 1, d + 2)
            ops.append(_op(f"build_{k}_{j}", guard, 2, ((q, [f"castle_{k}"], ()), (1 - q, (), ()))))
    goal = frozenset(f"castle_{k}" for k in range(1, c + 1))
    return MssProblem(tuple(conds), frozenset(), goal, tuple(ops))


def random_mss(
    rng: random.Random,
    n_conditions: int,
    n_operators: int,
    max_effects: int = 3,
    max_guard: int = 2,
    max_cost: int = 3,
    allow_stutter: bool = True,
) -> MssProblem:
    """A random problem with small guards and effects (for testing)."""
    conds = tuple(f"c{i}" for i in range(n_conditions))

    def subset(k):
        return frozenset(rng.sample(conds, rng.randint(0, min(k, n_conditions))))

    ops = []
    for i in range(n_operators):
        guard = subset(max_guard)
        k = rng.randint(1, max_effects)
        denom = rng.choice([2, 3, 4, 6])
        weights = [rng.randint(1, denom) for _ in range(k)]
        total = sum(weights)
        effects = tuple(
            Effect(Fraction(w, total), subset(2), subset(1)) for w in weights
        )
        ops.append(Operator(f"o{i}", guard, Fraction(rng.randint(1, max_cost)), effects))
    if not allow_stutter and not any(not op.guard for op in ops):
        op = ops[0]
        ops[0] = Operator(op.name, frozenset(), op.cost, op.effects)
    goal = frozenset(rng.sample(conds, rng.randint(1, min(2, n_conditions))))
    init = subset(n_conditions // 2)
    return MssProblem(conds, init, goal, tuple(ops))
