import random
from fractions import Fraction

import pytest

from handmdp import chain, singletons
from pamdp.explicit import (
    enumerate_states,
    explicit_emp_oracle,
    explicit_proper_states,
    explicit_ssp_oracle,
    strategy_to_dict,
)
from pamdp.iteration import (
    IterationLimitError,
    NoProperStateError,
    apply_improvements,
    check_emp_optimality,
    check_ssp_optimality,
    compute_lsigma,
    initial_proper_strategy,
    initial_strategy,
    proper_states,
    solve_emp,
    solve_ssp,
)
from pamdp.lumping import lump
from pamdp.mdp import PaPartition
from pamdp.strips import mss_to_mdp, parse_mss, random_mss

H = Fraction(1, 2)

GEO = """\
conditions: done
init:
goal: done
operator slow
  cost: 3
  effect: 1 => add(done) del()
operator try
  cost: 1
  effect: 1/2 => add(done) del()
  effect: 1/2 => add() del()
"""


def risky():
    # 1 -a-> goal or trap, 1 -c-> goal or retry; 2 is a trap
    return chain({
        1: {"a": (1, [(H, 3), (H, 2)]), "c": (5, [(H, 3), (H, 1)])},
        2: {"a": (1, [(1, 2)])},
        3: {"a": (1, [(1, 3)])},
    }, goal=[3])


def test_proper_states_and_initial_strategy():
    mdp = risky()
    proper = proper_states(mdp)
    assert proper.enumerate() == {1, 3}
    lam = initial_proper_strategy(mdp, proper)
    assert lam.lookup(1) == mdp.names.index("c")
    assert lam.domain.equals(proper)
    report = solve_ssp(mdp)
    assert report.value_at(1) == 10 and report.iterations == 1
    with pytest.raises(NoProperStateError):
        solve_ssp(mdp, start=2)


def test_geometric_improvement():
    mdp = mss_to_mdp(parse_mss(GEO))
    s0 = mdp.initial_state()
    lam = initial_proper_strategy(mdp, proper_states(mdp))
    assert mdp.action_name(lam.lookup(s0)) == "slow"
    report = solve_ssp(mdp, check=True)
    assert report.value_at(s0) == 2
    assert mdp.action_name(report.strategy.lookup(s0)) == "try"
    assert report.iterations == 2
    assert [h["value"] for h in report.history] == [3, 2]
    assert check_ssp_optimality(mdp, report) == []
    with pytest.raises(IterationLimitError):
        solve_ssp(mdp, max_iterations=1)
    approx = solve_ssp(mdp, exact=False)
    assert approx.value_at(s0) == pytest.approx(2.0, abs=1e-9)


def test_compute_lsigma_on_geometric():
    mdp = mss_to_mdp(parse_mss(GEO))
    s0 = mdp.initial_state()
    proper = proper_states(mdp)
    lam = initial_proper_strategy(mdp, proper)
    lumped = lump(mdp, lam, mdp.goal_pa())
    v = [3 if not g else 0 for g in lumped.goal_mask]
    free = proper - mdp.goal_pa()
    try_ = [a for a in mdp.actions() if mdp.action_name(a) == "try"][0]
    ls = compute_lsigma(mdp, try_, lumped, v, free)
    assert ls.lookup(s0) == 1 + H * 3
    assert compute_lsigma(mdp, try_, lumped, v, free, include_cost=False).lookup(s0) == H * 3


def test_three_actions_pick_the_best():
    mdp = chain({
        1: {"x": (4, [(1, 2)]), "y": (3, [(1, 2)]), "z": (1, [(H, 2), (H, 1)])},
        2: {"x": (1, [(1, 2)])},
    }, goal=[2])
    report = solve_ssp(mdp, check=True)
    assert report.value_at(1) == 2
    assert mdp.names[report.strategy.lookup(1)] == "z"
    # values decrease strictly along the run
    vals = [h["value"] for h in report.history]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_apply_improvements_later_entries_win():
    mdp = chain({i: {"a": (1, [(1, i)]), "b": (1, [(1, i)]), "c": (1, [(1, i)])} for i in (1, 2, 3)})
    lat = mdp.lattice
    S = mdp.states_pa()
    lam = PaPartition(lat, [(S, 0)], S)
    out = apply_improvements(lam, [(singletons(lat, [1, 2]), 1), (singletons(lat, [2, 3]), 2)])
    assert [out.lookup(s) for s in (1, 2, 3)] == [1, 2, 2]


def test_emp_bias_stage():
    # both choices at 1 end in the free loop at 2; only the bias differs
    mdp = chain({
        1: {"b": (5, [(1, 2)]), "a": (1, [(1, 2)])},
        2: {"b": (0, [(1, 2)])},
    })
    assert initial_strategy(mdp).lookup(1) == 0
    report = solve_emp(mdp, check=True)
    assert report.value_at(1) == 0
    assert mdp.names[report.strategy.lookup(1)] == "a"
    assert [h["stage"] for h in report.history] == [2, 0]
    assert report.block_value(1) == (0, 1)
    assert check_emp_optimality(mdp, report) == []


def test_emp_gain_stage():
    mdp = chain({
        1: {"stay": (3, [(1, 1)]), "go": (1, [(1, 2)])},
        2: {"stay": (1, [(1, 2)])},
    })
    report = solve_emp(mdp)
    assert report.value_at(1) == 1 and report.history[0]["stage"] == 1
    assert solve_emp(mdp, exact=False).value_at(1) == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(30))
def test_random_against_explicit_oracles(seed):
    rng = random.Random(1000 + seed)
    mdp = mss_to_mdp(random_mss(rng, rng.randint(2, 6), rng.randint(2, 5)))
    e = enumerate_states(mdp)
    proper = explicit_proper_states(e)
    assert {e.index[s] for s in proper_states(mdp).enumerate()} == proper
    s0 = mdp.initial_state()
    if e.index[s0] in proper:
        report = solve_ssp(mdp, check=True)
        _, v = explicit_ssp_oracle(e)
        for i in proper:
            assert report.value_at(e.states[i]) == v[i]
        assert check_ssp_optimality(mdp, report) == []
        lam = initial_proper_strategy(mdp, proper_states(mdp))
        d = strategy_to_dict(e, lam)
        assert set(d) == proper
    report = solve_emp(mdp, check=True)
    _, g = explicit_emp_oracle(e)
    for i, s in enumerate(e.states):
        assert report.value_at(s) == g[i]
    assert check_emp_optimality(mdp, report) == []


def test_blocking_model_is_rejected():
    mdp = chain({1: {"a": (1, [(1, 2)])}, 2: {"b": (1, [(1, 2)])}})
    mdp.rows.pop((2, "b"))
    with pytest.raises(ValueError):
        initial_strategy(mdp)
