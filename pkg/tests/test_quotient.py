import random
from fractions import Fraction

import pytest

from handmdp import chain
from pamdp.explicit import enumerate_states, evaluate_emp, evaluate_ssp, strategy_to_dict
from pamdp.iteration import initial_proper_strategy, initial_strategy, proper_states
from pamdp.linalg import SingularSystemError, solve, solve_exact
from pamdp.lumping import lump
from pamdp.mdp import PaPartition
from pamdp.quotient import (
    QuotientError,
    QuotientMc,
    build_quotient,
    emp_residuals,
    recurrent_classes,
    solve_gain_bias,
    solve_ssp_values,
    ssp_residual,
)
from pamdp.strips import mss_to_mdp, random_mss

H = Fraction(1, 2)


def mc(P, c, goal=None):
    n = len(P)
    return QuotientMc(n, P, [Fraction(x) for x in c], list(goal or [False] * n), [None] * n)


def test_ssp_values_by_hand():
    geo = mc([{0: H, 1: H}, {1: 1}], [1, 0], [False, True])
    assert solve_ssp_values(geo) == [2, 0]
    assert ssp_residual(geo, [2, 0]) == [0]
    line = mc([{1: 1}, {2: 1}, {2: 1}], [1, 1, 0], [False, False, True])
    assert solve_ssp_values(line) == [2, 1, 0]
    assert solve_ssp_values(mc([{0: 1}], [0], [True])) == [0]
    floats = solve_ssp_values(geo, exact=False)
    assert floats[0] == pytest.approx(2.0, abs=1e-9)


def test_ssp_without_reachable_goal_is_singular():
    with pytest.raises(SingularSystemError):
        solve_ssp_values(mc([{0: 1}, {1: 1}], [1, 0], [False, True]))


def test_gain_and_bias_by_hand():
    g, b = solve_gain_bias(mc([{0: 1}], [3]))
    assert (g, b) == ([3], [0])
    alt = mc([{1: 1}, {0: 1}], [1, 3])
    g, b = solve_gain_bias(alt)
    assert g == [2, 2] and b == [0, 1]
    assert emp_residuals(alt, g, b) == ([0, 0], [0, 0])
    trans = mc([{1: 1}, {1: 1}], [5, 2])
    assert solve_gain_bias(trans) == ([2, 2], [3, 0])
    fork = mc([{1: H, 2: H}, {1: 1}, {2: 1}], [0, 1, 3])
    g, b = solve_gain_bias(fork)
    assert g == [2, 1, 3]
    assert emp_residuals(fork, g, b) == ([0, 0, 0], [0, 0, 0])
    gf, bf = solve_gain_bias(fork, exact=False)
    assert gf == pytest.approx([2.0, 1.0, 3.0], abs=1e-9)


def test_recurrent_classes():
    fork = mc([{1: H, 2: H}, {1: 1}, {2: 1}], [0, 1, 3])
    assert recurrent_classes(fork) == ([[1], [2]], [0])
    cyc = mc([{1: 1}, {0: H, 2: H}, {2: 1}], [0, 0, 0])
    assert recurrent_classes(cyc) == ([[2]], [0, 1])


def test_build_quotient_from_lumping():
    mdp = chain({1: {"a": (1, [(H, 1), (H, 2)])}, 2: {"a": (1, [(1, 2)])}}, goal=[2])
    S = mdp.states_pa()
    lam = PaPartition(mdp.lattice, [(S, 0)], S)
    res = lump(mdp, lam, mdp.goal_pa())
    q = build_quotient(mdp, res, lam, mdp.goal_pa())
    i, j = res.block_of(1), res.block_of(2)
    assert q.P[i] == {i: H, j: H} and q.P[j] == {j: 1}
    assert q.row_sums() == [1, 1]
    assert solve_ssp_values(q)[i] == 2
    assert "goal" in q.format()


def test_build_quotient_rejects_mixed_goal_block():
    mdp = chain({1: {"a": (1, [(1, 2)])}, 2: {"a": (1, [(1, 2)])}}, goal=[2])
    S = mdp.states_pa()
    lam = PaPartition(mdp.lattice, [(S, 0)], S)
    res = lump(mdp, lam)
    res.partition = PaPartition(mdp.lattice, [(S, Fraction(1))], S)
    res.goal_mask = [False]
    res.representatives = [1]
    with pytest.raises(QuotientError):
        build_quotient(mdp, res, lam, mdp.goal_pa())


@pytest.mark.parametrize("seed", range(15))
def test_quotient_values_match_explicit_evaluation(seed):
    rng = random.Random(100 + seed)
    mdp = mss_to_mdp(random_mss(rng, rng.randint(2, 6), rng.randint(2, 5)))
    e = enumerate_states(mdp)
    lam = initial_strategy(mdp)
    res = lump(mdp, lam)
    g, _ = solve_gain_bias(build_quotient(mdp, res, lam))
    ref_g, _ = evaluate_emp(e, strategy_to_dict(e, lam))
    for i, s in enumerate(e.states):
        assert g[res.block_of(s)] == ref_g[i]
    proper = proper_states(mdp)
    if proper.is_empty():
        return
    lam = initial_proper_strategy(mdp, proper)
    res = lump(mdp, lam, mdp.goal_pa())
    v = solve_ssp_values(build_quotient(mdp, res, lam, mdp.goal_pa()))
    ref = evaluate_ssp(e, strategy_to_dict(e, lam))
    for i, s in enumerate(e.states):
        if s in proper:
            assert v[res.block_of(s)] == ref[i]


def test_linear_solvers():
    rows = [{0: 2, 1: 1}, {0: 1, 1: 3}]
    assert solve_exact(rows, [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    assert solve(rows, [3, 5], exact=False) == pytest.approx([0.8, 1.4])
    assert solve([], []) == []
    with pytest.raises(SingularSystemError):
        solve_exact([{0: 1, 1: 1}, {0: 2, 1: 2}], [1, 2])
    with pytest.raises(SingularSystemError):
        solve([{0: 1, 1: 1}, {0: 2, 1: 2}], [1, 2], exact=False)
    with pytest.raises(ValueError):
        solve_exact(rows, [1])
