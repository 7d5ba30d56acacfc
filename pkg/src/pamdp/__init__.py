"""Optimal strategies for monotonic MDPs over pseudo-antichain state sets.

Shortest-path and mean-payoff objectives are solved by strategy iteration
where the Markov chain of each strategy is lumped symbolically and only the
quotient is solved explicitly.
"""
from .iteration import (
    NoProperStateError,
    SolveReport,
    check_emp_optimality,
    check_ssp_optimality,
    compute_lsigma,
    improve_strategy_emp,
    improve_strategy_ssp,
    initial_proper_strategy,
    initial_strategy,
    proper_states,
    solve_emp,
    solve_ssp,
)
from .lattice import CapabilityError, ProductNatLattice, Semilattice, SupersetLattice
from .lumping import LumpResult, lump, split
from .mdp import MonotonicMdp, PaPartition, Strategy, strategies_equal
from .pseudo import PseudoAntichain, PseudoElement
from .quotient import QuotientMc, build_quotient, solve_gain_bias, solve_ssp_values
from .strips import MssProblem, gen_monkey, gen_moats, mss_to_mdp, parse_mss

__all__ = [
    "CapabilityError",
    "LumpResult",
    "MonotonicMdp",
    "MssProblem",
    "NoProperStateError",
    "PaPartition",
    "ProductNatLattice",
    "PseudoAntichain",
    "PseudoElement",
    "QuotientMc",
    "Semilattice",
    "SolveReport",
    "Strategy",
    "SupersetLattice",
    "build_quotient",
    "check_emp_optimality",
    "check_ssp_optimality",
    "compute_lsigma",
    "gen_moats",
    "gen_monkey",
    "improve_strategy_emp",
    "improve_strategy_ssp",
    "initial_proper_strategy",
    "initial_strategy",
    "lump",
    "mss_to_mdp",
    "parse_mss",
    "proper_states",
    "solve_emp",
    "solve_gain_bias",
    "solve_ssp",
    "solve_ssp_values",
    "split",
    "strategies_equal",
]
