"""Command-line front end: ``pamdp solve | gen | lump | compare``."""
from __future__ import annotations

import argparse
import logging
import random
import sys
from fractions import Fraction

from .explicit import (
    StateCapError,
    dict_to_strategy,
    enumerate_states,
    evaluate_emp,
    evaluate_ssp,
    explicit_emp_oracle,
    explicit_proper_states,
    explicit_ssp_oracle,
    strategy_to_dict,
)
from .iteration import (
    NoProperStateError,
    initial_proper_strategy,
    initial_strategy,
    proper_states,
    solve_emp,
    solve_ssp,
)
from .lumping import lump
from .quotient import build_quotient, solve_gain_bias, solve_ssp_values
from .strips import MssError, format_mss, gen_moats, gen_monkey, mss_to_mdp, parse_mss, random_mss, validate_mss


class CliError(Exception):
    """Reported on stderr with exit status 1."""


def _load(path: str, objective: str):
    try:
        with open(path, encoding="utf-8") as fh:
            problem = parse_mss(fh.read())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    except MssError as exc:
        raise CliError(f"{path}: {exc}") from None
    diags = validate_mss(problem, objective)
    if diags:
        raise CliError("\n".join(f"{path}: {d}" for d in diags))
    return problem


def _num(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(float(x))


def _strategy_lines(mdp, strategy) -> list[str]:
    lines = ["[strategy]"]
    for region, action in strategy.blocks:
        lines.append(f"{region.format()} -> {mdp.action_name(action)}")
    return lines


def cmd_solve(args) -> list[str]:
    if args.maximize and args.objective == "ssp":
        raise CliError("--maximize is only available with --objective emp")
    problem = _load(args.file, args.objective)
    mdp = mss_to_mdp(problem, negate_costs=args.maximize)
    exact = not args.float
    try:
        if args.objective == "ssp":
            report = solve_ssp(mdp, exact=exact)
        else:
            report = solve_emp(mdp, exact=exact)
    except NoProperStateError as exc:
        raise CliError(str(exc)) from None
    value = report.value_at(mdp.initial_state())
    if args.maximize:
        value = -value
    t = report.timings
    lines = [
        f"objective={args.objective}{'-max' if args.maximize else ''}",
        f"conditions={len(problem.conditions)}",
        f"states={mdp.lattice.size()}",
        f"value={_num(value)}",
        f"iterations={report.iterations}",
        f"max_quotient_blocks={report.max_quotient_blocks}",
        f"final_quotient_blocks={report.quotient.n}",
        f"strategy_blocks={len(report.strategy.blocks)}",
        f"strategy_pseudo_elements={sum(len(r) for r, _ in report.strategy.blocks)}",
        f"time_lump_s={t['lump']:.3f}",
        f"time_solve_s={t['solve']:.3f}",
        f"time_improve_s={t['improve']:.3f}",
        f"time_total_s={t['total']:.3f}",
    ]
    if not args.no_strategy:
        lines += _strategy_lines(mdp, report.strategy)
    return lines


def cmd_gen(args) -> list[str]:
    if args.family == "monkey":
        problem = gen_monkey(args.a, args.b)
    elif args.family == "moats":
        problem = gen_moats(args.a, args.b)
    else:
        rng = random.Random(args.seed)
        problem = random_mss(rng, args.a, args.b)
    return format_mss(problem).rstrip("\n").split("\n")


def cmd_lump(args) -> list[str]:
    problem = _load(args.file, args.objective)
    mdp = mss_to_mdp(problem)
    if args.objective == "ssp":
        proper = proper_states(mdp)
        if proper.is_empty():
            raise CliError("no proper state")
        strategy = initial_proper_strategy(mdp, proper)
        goal = mdp.goal_pa()
    else:
        strategy = initial_strategy(mdp)
        goal = None
    result = lump(mdp, strategy, goal, method=args.method)
    lines = [f"blocks={len(result)}", f"splits={result.stats['splits']}"]
    for i, ((region, cost), is_goal) in enumerate(zip(result.partition.blocks, result.goal_mask)):
        tag = " goal" if is_goal else ""
        lines.append(f"block {i}{tag} cost={cost} {region.format()}")
    return lines


def cmd_compare(args) -> list[str]:
    problem = _load(args.file, args.objective)
    mdp = mss_to_mdp(problem)
    try:
        e = enumerate_states(mdp, args.cap)
    except StateCapError as exc:
        raise CliError(str(exc)) from None
    s0 = mdp.initial_state()
    i0 = e.index[s0]
    if args.objective == "ssp":
        if i0 not in explicit_proper_states(e):
            raise CliError("the initial state is not proper")
        report = solve_ssp(mdp)
        ex_strategy, ex_values = explicit_ssp_oracle(e)
        sym_value = report.value_at(s0)
        ex_value = ex_values[i0]
        # each strategy under the other solver's evaluator
        sym_under_ex = evaluate_ssp(e, strategy_to_dict(e, report.strategy))[i0]
        lam = dict_to_strategy(mdp, e, ex_strategy)
        lumped = lump(mdp, lam, mdp.goal_pa())
        v = solve_ssp_values(build_quotient(mdp, lumped, lam, mdp.goal_pa()))
        ex_under_sym = v[lumped.block_of(s0)]
    else:
        report = solve_emp(mdp)
        ex_strategy, ex_gains = explicit_emp_oracle(e)
        sym_value = report.value_at(s0)
        ex_value = ex_gains[i0]
        sym_under_ex = evaluate_emp(e, strategy_to_dict(e, report.strategy))[0][i0]
        lam = dict_to_strategy(mdp, e, ex_strategy)
        lumped = lump(mdp, lam)
        g, _ = solve_gain_bias(build_quotient(mdp, lumped, lam))
        ex_under_sym = g[lumped.block_of(s0)]
    match = sym_value == ex_value == sym_under_ex == ex_under_sym
    return [
        f"objective={args.objective}",
        f"states={len(e)}",
        f"symbolic_value={sym_value}",
        f"explicit_value={ex_value}",
        f"symbolic_strategy_explicit_eval={sym_under_ex}",
        f"explicit_strategy_symbolic_eval={ex_under_sym}",
        f"match={'true' if match else 'false'}",
    ]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pamdp", description="Strategy synthesis for monotonic MDPs.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an MSS problem file")
    p.add_argument("file")
    p.add_argument("--objective", choices=["ssp", "emp"], default="ssp")
    p.add_argument("--maximize", action="store_true", help="maximize mean payoff (negates costs)")
    p.add_argument("--float", action="store_true", help="floating-point linear solves")
    p.add_argument("--no-strategy", action="store_true", help="omit the strategy dump")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="print a generated problem")
    p.add_argument("family", choices=["monkey", "moats", "random"])
    p.add_argument("a", type=int, help="monkey: pieces per stick; moats: depth; random: conditions")
    p.add_argument("b", type=int, help="monkey: sticks; moats: castles; random: operators")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("lump", help="lump the chain of a strategy")
    p.add_argument("file")
    p.add_argument("--strategy", choices=["initial"], default="initial")
    p.add_argument("--objective", choices=["ssp", "emp"], default="ssp")
    p.add_argument("--method", choices=["sweep", "worklist"], default="sweep")
    p.set_defaults(func=cmd_lump)

    p = sub.add_parser("compare", help="check against the explicit solver")
    p.add_argument("file")
    p.add_argument("--objective", choices=["ssp", "emp"], default="ssp")
    p.add_argument("--cap", type=int, default=1 << 12, help="maximum number of enumerated states")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        lines = args.func(args)
    except CliError as exc:
        print(f"pamdp: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


cli_main = main


if __name__ == "__main__":
    sys.exit(main())
