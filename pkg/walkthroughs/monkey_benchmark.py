"""Scaling of the shortest-path solver on the monkey benchmark.

Usage: python3 walkthroughs/monkey_benchmark.py [MAX_STICKS]

For growing numbers of sticks the number of states doubles with every
condition while the quotient stays small.
"""
import sys

from pamdp import gen_monkey, mss_to_mdp, solve_ssp

max_sticks = int(sys.argv[1]) if len(sys.argv) > 1 else 3
print(f"{'p':>2} {'s':>2} {'states':>10} {'value':>10} {'it':>3} {'blocks':>6} {'lump':>7} {'solve':>7} {'improve':>7}")
for s in range(1, max_sticks + 1):
    for p in (2, 3):
        problem = gen_monkey(p, s)
        mdp = mss_to_mdp(problem)
        r = solve_ssp(mdp)
        t = r.timings
        print(f"{p:>2} {s:>2} {2 ** len(problem.conditions):>10} {str(r.value_at(0)):>10} {r.iterations:>3} "
              f"{r.max_quotient_blocks:>6} {t['lump']:>7.2f} {t['solve']:>7.2f} {t['improve']:>7.2f}")
