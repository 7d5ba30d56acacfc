import random
from fractions import Fraction

import pytest

from handmdp import chain, singletons
from pamdp.explicit import enumerate_states, explicit_lump_oracle, strategy_to_dict
from pamdp.iteration import initial_proper_strategy, initial_strategy, proper_states
from pamdp.lumping import is_stable, lump, split, strategy_cost_partition, successor_partition
from pamdp.mdp import PaPartition
from pamdp.strips import mss_to_mdp, random_mss

H = Fraction(1, 2)


def whole(mdp, action=0):
    S = mdp.states_pa()
    return PaPartition(mdp.lattice, [(S, action)], S)


def blocks_of(result):
    return {frozenset(r.enumerate()) for r, _ in result.partition.blocks}


def test_split_accumulates_over_effects():
    mdp = chain({
        1: {"a": (1, [(H, 4), (H, 5)])},
        2: {"a": (1, [(H, 5), (H, 4)])},
        3: {"a": (1, [(H, 5), (H, 5)])},
        4: {"a": (1, [(1, 4)])},
        5: {"a": (1, [(1, 5)])},
    })
    lam = whole(mdp)
    lat = mdp.lattice
    out = split(mdp, singletons(lat, [1, 2, 3]), singletons(lat, [4]), lam)
    assert [(p, r.enumerate()) for p, r in out] == [(0, {3}), (H, {1, 2})]
    # a splitter that nothing reaches leaves the block whole
    out = split(mdp, singletons(lat, [1, 2, 3]), singletons(lat, [1]), lam)
    assert [(p, r.enumerate()) for p, r in out] == [(0, {1, 2, 3})]


def test_successor_partition_vectors():
    mdp = chain({
        1: {"a": (1, [(H, 4), (H, 5)])},
        2: {"a": (1, [(H, 5), (H, 4)])},
        3: {"a": (1, [(H, 5), (H, 5)])},
        4: {"a": (1, [(1, 4)])},
        5: {"a": (1, [(1, 5)])},
    })
    lat = mdp.lattice
    targets = [singletons(lat, [4]), singletons(lat, [1, 2, 3, 5])]
    out = successor_partition(mdp, singletons(lat, [1, 2, 3]), 0, (H, H), targets)
    got = {vec: r.enumerate() for r, vec in out}
    assert got == {((0, H), (1, H)): {1, 2}, ((1, 1),): {3}}


def test_lump_hand_chains():
    two_step = chain({1: {"a": (1, [(1, 2)])}, 2: {"a": (1, [(1, 3)])}, 3: {"a": (1, [(1, 3)])}}, goal=[3])
    res = lump(two_step, whole(two_step), two_step.goal_pa(), check=True)
    assert blocks_of(res) == {frozenset({1}), frozenset({2}), frozenset({3})}
    assert res.goal_mask[res.block_of(3)] and not res.goal_mask[res.block_of(1)]

    parallel = chain({1: {"a": (1, [(1, 3)])}, 2: {"a": (1, [(1, 3)])}, 3: {"a": (5, [(1, 3)])}}, goal=[3])
    res = lump(parallel, whole(parallel), parallel.goal_pa(), check=True)
    assert blocks_of(res) == {frozenset({1, 2}), frozenset({3})}
    # goal costs are ignored in the shortest-path quotient
    assert res.partition.blocks[res.block_of(3)].payload == 0

    costs = chain({1: {"a": (1, [(1, 3)])}, 2: {"a": (2, [(1, 3)])}, 3: {"a": (1, [(1, 3)])}})
    res = lump(costs, whole(costs), check=True)
    assert blocks_of(res) == {frozenset({1, 3}), frozenset({2})}
    assert strategy_cost_partition(costs, whole(costs)).blocks[0].payload in (1, 2)


def test_unknown_method():
    mdp = chain({1: {"a": (1, [(1, 1)])}})
    with pytest.raises(ValueError):
        lump(mdp, whole(mdp), method="magic")


@pytest.mark.parametrize("seed", range(25))
def test_lump_matches_explicit_bisimulation(seed):
    rng = random.Random(seed)
    mdp = mss_to_mdp(random_mss(rng, rng.randint(2, 6), rng.randint(2, 5)))
    e = enumerate_states(mdp)
    lam = initial_strategy(mdp)
    for goal in (None, mdp.goal_pa()):
        ref = explicit_lump_oracle(e, strategy_to_dict(e, lam), absorbing_goal=goal is not None)
        for method in ("sweep", "worklist"):
            res = lump(mdp, lam, goal, method=method)
            assert blocks_of(res) == set(ref)
            assert is_stable(mdp, lam, res, goal)
    proper = proper_states(mdp)
    if not proper.is_empty():
        lam = initial_proper_strategy(mdp, proper)
        res = lump(mdp, lam, mdp.goal_pa(), check=True)
        assert blocks_of(res) == set(explicit_lump_oracle(e, strategy_to_dict(e, lam)))


def test_unstable_partition_is_detected():
    mdp = chain({1: {"a": (1, [(1, 2)])}, 2: {"a": (1, [(1, 3)])}, 3: {"a": (1, [(1, 3)])}}, goal=[3])
    res = lump(mdp, whole(mdp), mdp.goal_pa())
    lat = mdp.lattice
    merged = PaPartition(lat, [(singletons(lat, [1, 2]), 1), (singletons(lat, [3]), 0)], mdp.states_pa())
    res.partition = merged
    res.goal_mask = [False, True]
    assert not is_stable(mdp, whole(mdp), res, mdp.goal_pa())
