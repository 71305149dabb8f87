"""Command-line entry point (``g3m`` / ``python -m g3mlab``).

Failures exit with status 1 and a single JSON object on stderr, e.g.
``{"error": "ParseError", "message": "line 3: ...", "line": 3}``.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from g3mlab.amm import PoolState
from g3mlab.data import (
    ResultTable,
    emit_plot_data,
    load_prices,
    load_sweep_config,
    write_prices,
    write_results,
)
from g3mlab.errors import G3MError
from g3mlab.hedging import hedge_path
from g3mlab.simulator import SimConfig, gbm_path, grid_configs, refine_path, run_simulation, sweep
from g3mlab.skorokhod import band_position, barrier_width, continuous_arb_dynamics, iterated_arb_dynamics

SECONDS_PER_YEAR = 365.0 * 86400.0


def _add_pool_flags(p: argparse.ArgumentParser, fee: bool = True) -> None:
    if fee:
        p.add_argument("--fee-bps", type=float, default=30.0, help="proportional fee in basis points (default 30)")
    p.add_argument("--alpha", type=float, default=0.5, help="weight of the base asset (default 0.5)")
    p.add_argument("--y0", type=float, default=1_000_000.0, help="initial quote-asset reserve (default 1e6)")


def _add_agent_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon-rel", type=float, default=1e-6, help="small-trade safety margin, relative")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="g3m", description="Geometric mean market maker simulations and diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one agent-based simulation")
    p.add_argument("--prices", required=True, help="timestamp,price CSV")
    _add_pool_flags(p)
    _add_agent_flags(p)
    p.add_argument("--p", type=float, default=0.0, help="probability of a liquidity-taker trade")
    p.add_argument("--p-small", type=float, default=0.0, help="probability that a taker trade is small")
    p.add_argument("--out", help="result CSV (default stdout)")
    p.add_argument("--trajectory", help="also write long-format plot data of the run here")

    p = sub.add_parser("sweep", help="run a grid of simulations (default: the 15-run fee/agent grid)")
    p.add_argument("--prices", required=True)
    p.add_argument("--config", help="INI file, one section per run; omit for the built-in grid")
    _add_pool_flags(p, fee=False)
    _add_agent_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="result CSV (default stdout)")

    p = sub.add_parser("arb-only", help="continuous arbitrage dynamics diagnostics")
    p.add_argument("--prices", required=True)
    _add_pool_flags(p)
    p.add_argument("--out", help="long-format plot data of the reflected dynamics")

    p = sub.add_parser("hedge-check", help="refinement study of the rebalancing hedge")
    p.add_argument("--prices", help="base path; omit to use a synthetic GBM path")
    _add_pool_flags(p)
    p.add_argument("--levels", type=int, default=3, help="number of dyadic refinements")
    p.add_argument("--seed", type=int, default=0, help="seed for the bridge refinement (and synthetic path)")
    p.add_argument("--out", help="CSV table (default stdout)")

    p = sub.add_parser("gen-gbm", help="write a synthetic geometric Brownian motion path")
    p.add_argument("--s0", type=float, default=13771.0)
    p.add_argument("--mu", type=float, default=0.0, help="annualised drift")
    p.add_argument("--sigma", type=float, default=0.8, help="annualised volatility")
    p.add_argument("--n", type=int, default=200_000, help="number of steps")
    p.add_argument("--dt-seconds", type=float, default=30.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="price CSV (default stdout)")
    return parser


def _sink(path):
    return open(path, "w", encoding="utf-8", newline="") if path else sys.stdout


def _write_table(results, out) -> None:
    sink = _sink(out)
    try:
        write_results(ResultTable.from_results(results), sink)
    finally:
        if out:
            sink.close()


def cmd_simulate(args) -> int:
    prices = load_prices(args.prices)
    config = SimConfig.from_bps(
        args.fee_bps, p=args.p, p_small=args.p_small, seed=args.seed,
        y0=args.y0, alpha=args.alpha, epsilon_rel=args.epsilon_rel,
    )
    result = run_simulation(config, prices, record=bool(args.trajectory))
    _write_table([result], args.out)
    if args.trajectory:
        tr = result.trajectory
        emit_plot_data(prices, {"X": tr.X, "Y": tr.Y, "il": tr.il, "psi_hat": tr.psi_hat}, args.trajectory)
    return 0


def cmd_sweep(args) -> int:
    prices = load_prices(args.prices)
    if args.config:
        base = {"seed": args.seed, "y0": args.y0, "alpha": args.alpha, "epsilon_rel": args.epsilon_rel}
        configs = [SimConfig(**{**base, **entry}) for entry in load_sweep_config(args.config)]
    else:
        configs = grid_configs(seed=args.seed, y0=args.y0, alpha=args.alpha, epsilon_rel=args.epsilon_rel)
    _write_table(sweep(configs, prices, workers=args.workers), args.out)
    return 0


def _qv(values) -> float:
    return float(np.sum(np.diff(values) ** 2))


def cmd_arb_only(args) -> int:
    prices = load_prices(args.prices)
    tau = args.fee_bps / 1e4
    pool0 = PoolState.at_price(args.y0, float(prices.prices[0]), args.alpha, tau)
    cont = continuous_arb_dynamics(pool0, prices)
    disc = iterated_arb_dynamics(pool0, prices)
    phi = band_position(cont, prices, tau)
    hedge = hedge_path(pool0.x, cont.X, prices.prices)
    il = pool0.y + pool0.x * prices.prices - (cont.Y + cont.X * prices.prices)
    summary = {
        "n_steps": len(prices),
        "tau": tau,
        "max_rel_diff_X": float(np.max(np.abs(disc.X / cont.X - 1.0))),
        "max_rel_diff_Y": float(np.max(np.abs(disc.Y / cont.Y - 1.0))),
        "band_ok": bool(np.all((phi >= -1e-9) & (phi <= barrier_width(tau) + 1e-9))),
        "qv_pool": _qv(cont.S),
        "qv_external": _qv(prices.prices),
        "Psi_T": float(il[-1]),
        "psi_hat_T": float(hedge[-1]),
    }
    print(json.dumps(summary, sort_keys=True))
    if args.out:
        emit_plot_data(
            prices,
            {"X": cont.X, "Y": cont.Y, "pool_mid": cont.S, "phi": phi, "il": il, "psi_hat": hedge},
            args.out,
        )
    return 0


def cmd_hedge_check(args) -> int:
    if args.prices:
        base = load_prices(args.prices)
    else:
        dt = 30.0 / SECONDS_PER_YEAR
        base = gbm_path(100.0, 0.0, 0.8, 2000, dt, seed=args.seed)
    tau = args.fee_bps / 1e4
    rows = []
    for level, path in enumerate(refine_path(base, args.levels, seed=args.seed)):
        res = run_simulation(SimConfig(tau=tau, y0=args.y0, alpha=args.alpha), path)
        pool0 = PoolState.at_price(args.y0, float(path.prices[0]), args.alpha, tau)
        cont = continuous_arb_dynamics(pool0, path)
        rows.append([
            level, len(path), res.Psi_T, res.psi_hat_T,
            abs(res.psi_hat_T - res.Psi_T) / (res.V_T + res.Psi_T),
            _qv(cont.S), _qv(path.prices),
        ])
    sink = _sink(args.out)
    try:
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(["level", "n_steps", "Psi_T", "psi_hat_T", "abs_rel_err", "qv_pool", "qv_external"])
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    finally:
        if args.out:
            sink.close()
    return 0


def cmd_gen_gbm(args) -> int:
    path = gbm_path(args.s0, args.mu, args.sigma, args.n, args.dt_seconds / SECONDS_PER_YEAR, seed=args.seed)
    path = type(path)(np.arange(len(path), dtype=np.float64) * args.dt_seconds, path.prices)
    sink = _sink(args.out)
    try:
        write_prices(path, sink)
    finally:
        if args.out:
            sink.close()
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "arb-only": cmd_arb_only,
    "hedge-check": cmd_hedge_check,
    "gen-gbm": cmd_gen_gbm,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (G3MError, OSError) as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        line = getattr(exc, "line", None)
        if line is not None:
            payload["line"] = line
        print(json.dumps(payload), file=sys.stderr)
        return 1
