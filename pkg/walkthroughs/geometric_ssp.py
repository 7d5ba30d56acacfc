"""Shortest path on the smallest interesting problem.

``try`` costs 1 and succeeds with probability 1/2; ``slow`` costs 3 and
always succeeds.  Retrying is cheaper on average (expected cost 2).  The
symbolic solver and the explicit baseline agree.
"""
from pamdp import mss_to_mdp, parse_mss, solve_ssp
from pamdp.explicit import enumerate_states, explicit_ssp_oracle

TEXT = """
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

mdp = mss_to_mdp(parse_mss(TEXT))
report = solve_ssp(mdp)
s0 = mdp.initial_state()

print("value at start:", report.value_at(s0))
print("iterations:", report.iterations)
for h in report.history:
    print("  blocks", h["blocks"], "value", h["value"])
for region, action in report.strategy.blocks:
    print(f"  {region.format()} -> {mdp.action_name(action)}")
print(report.quotient.format())

e = enumerate_states(mdp)
_, values = explicit_ssp_oracle(e)
print("explicit value:", values[e.index[s0]])
