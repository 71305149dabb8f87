"""Geometric mean market maker laboratory.

Swap and quote mechanics with a proportional fee, optimal arbitrage,
reflected arbitrage-only reserve dynamics, impermanent-loss hedging and an
agent-based simulator.
"""
from g3mlab.amm import (
    PoolState,
    Quote,
    Trade,
    TradeKind,
    apply_swap,
    apply_swap_y,
    block_vs_split,
    dx_for_dy,
    fee_adjusted_mean,
    marginal_rate,
    max_small_buy,
    max_small_sell,
    quote,
    swap_out,
)
from g3mlab.arbitrage import ArbOutcome, arb_profit, optimal_arb
from g3mlab.data import PricePath, ResultTable, emit_plot_data, load_prices, write_prices, write_results
from g3mlab.hedging import HedgeLedger, ILReport, hedge_step, impermanent_loss, lvr, psi_no_fee
from g3mlab.simulator import SimConfig, SimResult, gbm_path, run_simulation, sweep
from g3mlab.skorokhod import (
    ReflectionSolution,
    ReservePaths,
    continuous_arb_dynamics,
    reserves_from_reflection,
    solve_reflection,
)

__version__ = "0.1.0"
