import random
from fractions import Fraction

import pytest

from pamdp.mdp import (
    PaPartition,
    allow_region,
    clear_cache,
    enabled_region,
    exists_pre,
    partition_refine,
    partition_validate,
    pre_lambda,
    pre_sigma_tau,
    strategies_equal,
    strategy_action,
)
from pamdp.pseudo import PseudoAntichain
from pamdp.strips import Effect, MssProblem, Operator, mss_to_mdp, random_mss


def abc_problem():
    op = Operator("o", frozenset("a"), Fraction(1), (Effect(Fraction(1), frozenset("b"), frozenset("c")),))
    return MssProblem(("a", "b", "c"), frozenset(), frozenset("b"), (op,))


def brute_pre(mdp, A: set, action, effect):
    lat = mdp.lattice
    return {s for s in lat.elements() if mdp.enabled(s, action) and mdp.successor(s, action, effect) in A}


def closed(mdp, *names):
    lat = mdp.lattice
    return PseudoAntichain.closed(lat, [lat.encode([n]) for n in names])


def test_pre_examples_from_a_single_operator():
    mdp = mss_to_mdp(abc_problem())
    lat = mdp.lattice
    got = pre_sigma_tau(mdp, closed(mdp, "b"), 0, 0)
    assert got.equals(closed(mdp, "a"))
    assert got.enumerate() == brute_pre(mdp, closed(mdp, "b").enumerate(), 0, 0)
    assert pre_sigma_tau(mdp, closed(mdp, "c"), 0, 0).is_empty()
    S = mdp.states_pa()
    assert pre_sigma_tau(mdp, S, 0, 0).equals(enabled_region(mdp, 0))
    assert enabled_region(mdp, 0).equals(closed(mdp, "a"))
    assert enabled_region(mdp, 0).is_closed_repr()
    # the stutter action is enabled everywhere
    assert enabled_region(mdp, 1).equals(S)
    assert lat.size() == 8


def test_allow_region():
    mdp = mss_to_mdp(abc_problem())
    S = mdp.states_pa()
    empty = PseudoAntichain.empty(mdp.lattice)
    assert allow_region(mdp, 0, S).equals(enabled_region(mdp, 0))
    assert allow_region(mdp, 0, empty).is_empty()


def random_mdp_sets(seed, n=5):
    rng = random.Random(seed)
    mdp = mss_to_mdp(random_mss(rng, n, 4))
    lat = mdp.lattice
    elems = list(lat.elements())

    def rand_pa():
        pairs = [(rng.choice(elems), [rng.choice(elems) for _ in range(rng.randint(0, 2))])
                 for _ in range(rng.randint(0, 3))]
        return PseudoAntichain.from_pairs(lat, pairs)

    return mdp, rand_pa


@pytest.mark.parametrize("seed", range(8))
def test_pre_family_matches_brute_force(seed):
    mdp, rand_pa = random_mdp_sets(seed)
    for _ in range(10):
        A, B = rand_pa(), rand_pa()
        a = A.enumerate()
        for act in mdp.actions():
            for t in mdp.effects(act):
                pa_, pb = pre_sigma_tau(mdp, A, act, t), pre_sigma_tau(mdp, B, act, t)
                assert pa_.enumerate() == brute_pre(mdp, a, act, t)
                # distributes over Boolean operations
                assert pre_sigma_tau(mdp, A | B, act, t).equals(pa_ | pb)
                assert pre_sigma_tau(mdp, A & B, act, t).equals(pa_ & pb)
                assert pre_sigma_tau(mdp, A - B, act, t).equals(pa_ - pb)
            allow = {s for s in mdp.lattice.elements() if mdp.enabled(s, act)
                     and all(mdp.successor(s, act, t) in a for t in mdp.effects(act))}
            assert allow_region(mdp, act, A).enumerate() == allow
            some = set().union(*(brute_pre(mdp, a, act, t) for t in mdp.effects(act)))
            assert exists_pre(mdp, act, A).enumerate() == some


def test_pre_of_closed_set_is_closed():
    mdp, _ = random_mdp_sets(3)
    lat = mdp.lattice
    A = PseudoAntichain.closed(lat, [lat.encode(["c0"]), lat.encode(["c1", "c2"])])
    for act in mdp.actions():
        for t in mdp.effects(act):
            assert pre_sigma_tau(mdp, A, act, t).is_closed_repr()


def two_block_strategy(mdp):
    lat = mdp.lattice
    S = mdp.states_pa()
    left = S & closed(mdp, "c0")
    return PaPartition(lat, [(left, 0), (S - left, len(mdp.actions()) - 1)], S), left


def test_pre_lambda():
    rng = random.Random(4)
    problem = random_mss(rng, 4, 3, allow_stutter=False)
    mdp = mss_to_mdp(problem)
    S = mdp.states_pa()
    const = PaPartition(mdp.lattice, [(S, 0)], S)
    C = closed(mdp, "c1")
    for t in mdp.effects(0):
        assert pre_lambda(mdp, C, 0, t, const).equals(pre_sigma_tau(mdp, C, 0, t) & S)
        assert pre_lambda(mdp, S, 0, t, const).equals(S)
    lam, left = two_block_strategy(mdp)
    last = len(mdp.actions()) - 1
    for act in (0, last):
        for t in mdp.effects(act):
            got = pre_lambda(mdp, C, act, t, lam).enumerate()
            want = {s for s in S.enumerate() if lam.lookup(s) == act and mdp.successor(s, act, t) in C}
            assert got == want


def test_partition_refine_and_validate():
    mdp, _ = random_mdp_sets(1, 4)
    lat = mdp.lattice
    S = mdp.states_pa()
    a, b = closed(mdp, "c0") & S, closed(mdp, "c1") & S
    P = PaPartition(lat, [(a, "a"), (S - a, "na")], S)
    Q = PaPartition(lat, [(b, "b"), (S - b, "nb")], S)
    trivial = PaPartition(lat, [(S, None)], S)
    assert len(partition_refine(P, trivial)) == len(P)
    assert len(partition_refine(P, P)) == len(P)
    R = partition_refine(P, Q)
    assert len(R) <= 4 and partition_validate(R, S)
    for region, (p, q) in R.blocks:
        for s in region.enumerate():
            assert P.lookup(s) == p and Q.lookup(s) == q
    assert partition_validate(P, S)
    assert not partition_validate(PaPartition(lat, [(S, 1), (a, 2)]))
    assert not partition_validate(PaPartition(lat, [(a, 1)]), S)
    with pytest.raises(ValueError):
        partition_refine(P, PaPartition(lat, [(a, 1)]))


def test_strategies_equal():
    rng = random.Random(9)
    mdp = mss_to_mdp(random_mss(rng, 4, 3, allow_stutter=False))
    lam, left = two_block_strategy(mdp)
    assert strategies_equal(lam, lam)
    lat = mdp.lattice
    S = mdp.states_pa()
    c1 = closed(mdp, "c1")
    split = PaPartition(lat, [(left & c1, 0), (left - c1, 0), (S - left, lam.blocks[1].payload)], S)
    assert strategies_equal(lam, split)
    changed = PaPartition(lat, [(left, 1), (S - left, lam.blocks[1].payload)], S)
    assert not strategies_equal(lam, changed)
    with pytest.raises(ValueError):
        strategies_equal(lam, PaPartition(lat, [(left, 0)]))
    assert strategy_action(lam, left.pick()) == 0


def test_cache_can_be_cleared():
    mdp = mss_to_mdp(abc_problem())
    enabled_region(mdp, 0)
    assert mdp.__dict__.get("_pa_cache")
    clear_cache(mdp)
    assert "_pa_cache" not in mdp.__dict__
