"""Long-run average cost on the sand-castle benchmark.

Without a goal the walker keeps acting forever; the gain is the average cost
per step.  Minimizing it picks the cheapest loop; maximizing it (costs read
as payoffs) picks the most rewarding one.
"""
from pamdp import check_emp_optimality, gen_moats, mss_to_mdp, solve_emp

problem = gen_moats(2, 2)
for maximize in (False, True):
    mdp = mss_to_mdp(problem, negate_costs=maximize)
    report = solve_emp(mdp)
    gain = report.value_at(mdp.initial_state())
    print("maximize" if maximize else "minimize", "gain:", -gain if maximize else gain)
    print("  iterations:", report.iterations, "stages:", [h["stage"] for h in report.history])
    print("  quotient blocks:", report.quotient.n)
    print("  optimality violations:", len(check_emp_optimality(mdp, report)))
