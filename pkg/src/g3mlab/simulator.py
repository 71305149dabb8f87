"""Discrete-time agent-based simulation of a G3M pool against an external price.

Each observation of the external price is one step:

1. if the price lies outside the pool's bid/ask band, an arbitrageur trades
   it back inside (optimal trade);
2. otherwise, with probability ``p`` a liquidity taker arrives. With
   probability ``p_small`` it is a small trade of ``(1 - epsilon_rel)`` times
   the largest size that keeps the price inside the band, in the direction
   with more room. Otherwise it is a large trade of twice that size in a
   fair-coin direction, immediately followed by an arbitrage trade;
3. the hedge is rebalanced using the reserves held before this step's trades.

Randomness: a PCG64 generator seeded with ``seed`` draws an ``(n_steps, 3)``
block of uniforms up front. Row ``t`` holds, in order, the trade-occurrence
draw, the small/large draw and the large-trade direction draw for step ``t``;
a draw is consumed only if that decision is reached, but its slot is fixed,
so results do not depend on which earlier branches were taken.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from g3mlab.amm import (
    PoolState,
    TradeKind,
    apply_swap,
    apply_swap_y,
    max_small_buy,
    max_small_sell,
    quote,
)
from g3mlab.arbitrage import optimal_arb
from g3mlab.data import PricePath
from g3mlab.errors import EmptyPath, InitialArbitrage, InvalidConfig, InvalidParams
from g3mlab.hedging import HedgeLedger, hedge_step, il_report
from g3mlab.skorokhod import INITIAL_RTOL

FEE_GRID_BPS = (1, 5, 10, 15, 30)
# (p, p_small) for the small-takers, large-takers and arbitrage-only regimes
AGENT_REGIMES = ((1.0, 1.0), (1.0, 0.0), (0.0, 0.0))


@dataclass(frozen=True)
class SimConfig:
    tau: float
    p: float = 0.0
    p_small: float = 0.0
    seed: int = 0
    y0: float = 1_000_000.0
    alpha: float = 0.5
    epsilon_rel: float = 1e-6
    x0: float | None = None  # None: chosen so the pool's mid equals the first price

    def __post_init__(self):
        checks = [
            (0 <= self.tau < 1, f"tau must lie in [0, 1), got {self.tau!r}"),
            (0 <= self.p <= 1, f"p must lie in [0, 1], got {self.p!r}"),
            (0 <= self.p_small <= 1, f"p_small must lie in [0, 1], got {self.p_small!r}"),
            (0 < self.alpha < 1, f"alpha must lie in (0, 1), got {self.alpha!r}"),
            (self.y0 > 0 and math.isfinite(self.y0), f"y0 must be positive, got {self.y0!r}"),
            (0 < self.epsilon_rel < 1, f"epsilon_rel must lie in (0, 1), got {self.epsilon_rel!r}"),
            (self.x0 is None or (self.x0 > 0 and math.isfinite(self.x0)), f"x0 must be positive, got {self.x0!r}"),
            (isinstance(self.seed, (int, np.integer)) and self.seed >= 0, f"seed must be a non-negative int, got {self.seed!r}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise InvalidConfig(msg)

    @classmethod
    def from_bps(cls, fee_bps: float, **kwargs) -> "SimConfig":
        return cls(tau=fee_bps / 1e4, **kwargs)

    @property
    def fee_bps(self) -> float:
        return self.tau * 1e4

    def initial_pool(self, s0: float) -> PoolState:
        if self.x0 is None:
            return PoolState.at_price(self.y0, s0, self.alpha, self.tau)
        return PoolState(self.x0, self.y0, self.alpha, self.tau)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Per-step series recorded at the end of each step (after trades)."""

    X: np.ndarray
    Y: np.ndarray
    psi_hat: np.ndarray
    il: np.ndarray


@dataclass(frozen=True)
class SimResult:
    tau: float
    p: float
    p_small: float
    V_T: float
    Psi_T: float
    psi_hat_T: float
    n_arb: int
    n_large: int
    n_small: int
    n_noop: int
    n_steps: int
    il_per_trade: float
    rel_err: float  # percent
    trajectory: Trajectory | None = field(default=None, compare=False, repr=False)

    @property
    def n_trades(self) -> int:
        return self.n_arb + self.n_large + self.n_small


def run_simulation(config: SimConfig, prices: PricePath, record: bool = False) -> SimResult:
    if prices is None or len(prices) == 0:
        raise EmptyPath("price path has no observations")
    if not isinstance(config, SimConfig):
        raise InvalidConfig(f"expected SimConfig, got {type(config).__name__}")
    s_path = prices.prices.tolist()
    n = len(s_path)
    pool0 = config.initial_pool(s_path[0])
    pool = pool0
    if not quote(pool).encloses(s_path[0], rtol=INITIAL_RTOL):
        raise InitialArbitrage(f"initial price {s_path[0]!r} lies outside the initial pool's band")

    draws = np.random.Generator(np.random.PCG64(config.seed)).random((n, 3)).tolist()
    p, p_small = config.p, config.p_small
    shrink = 1.0 - config.epsilon_rel
    x0 = pool0.x
    ledger = HedgeLedger(x_prev=x0, s_prev=s_path[0])
    n_arb = n_large = n_small = n_noop = 0
    if record:
        rec_x, rec_y, rec_hat = np.empty(n), np.empty(n), np.empty(n)

    for t, s in enumerate(s_path):
        q = quote(pool)
        if not q.encloses(s):
            out = optimal_arb(pool, s)
            pool = out.pool
            if out.trade is None:
                n_noop += 1
            else:
                n_arb += 1
        else:
            u_occur, u_size, u_dir = draws[t]
            if u_occur < p:
                if u_size < p_small:
                    if s - q.bid > q.ask - s:
                        pool, trade = apply_swap_y(pool, shrink * max_small_buy(pool, s), TradeKind.SMALL)
                    else:
                        pool, trade = apply_swap(pool, shrink * max_small_sell(pool, s), TradeKind.SMALL)
                    if trade.is_null:
                        n_noop += 1
                    else:
                        n_small += 1
                else:
                    if u_dir < 0.5:
                        pool, trade = apply_swap_y(pool, 2.0 * max_small_buy(pool, s), TradeKind.LARGE)
                    else:
                        pool, trade = apply_swap(pool, 2.0 * max_small_sell(pool, s), TradeKind.LARGE)
                    if trade.is_null:
                        n_noop += 1
                    else:
                        n_large += 1
                        out = optimal_arb(pool, s)
                        pool = out.pool
                        n_arb += out.trade is not None
            else:
                n_noop += 1
        ledger = hedge_step(ledger, x0, pool.x, s)
        if record:
            rec_x[t], rec_y[t], rec_hat[t] = pool.x, pool.y, ledger.psi_hat

    report = il_report(pool0.x, pool0.y, pool.x, pool.y, s_path[-1], ledger.psi_hat)
    n_trades = n_arb + n_large + n_small
    trajectory = None
    if record:
        il = pool0.y + pool0.x * prices.prices - (rec_y + rec_x * prices.prices)
        trajectory = Trajectory(X=rec_x, Y=rec_y, psi_hat=rec_hat, il=il)
    return SimResult(
        tau=config.tau,
        p=config.p,
        p_small=config.p_small,
        V_T=report.V_T,
        Psi_T=report.Psi_T,
        psi_hat_T=report.psi_hat_T,
        n_arb=n_arb,
        n_large=n_large,
        n_small=n_small,
        n_noop=n_noop,
        n_steps=n,
        il_per_trade=report.Psi_T / n_trades if n_trades else 0.0,
        rel_err=100.0 * report.rel_err,
        trajectory=trajectory,
    )


def _run_one(args):
    config, prices = args
    return run_simulation(config, prices)


def sweep(configs: list[SimConfig], prices: PricePath, workers: int = 1) -> list[SimResult]:
    """Run every config on the same path; results keep the input order."""
    configs = list(configs)
    for c in configs:
        if not isinstance(c, SimConfig):
            raise InvalidConfig(f"expected SimConfig, got {type(c).__name__}")
    if workers <= 1 or len(configs) <= 1:
        return [run_simulation(c, prices) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, [(c, prices) for c in configs]))


def grid_configs(seed: int = 0, y0: float = 1_000_000.0, alpha: float = 0.5, epsilon_rel: float = 1e-6) -> list[SimConfig]:
    """The 15-run grid: every agent regime in AGENT_REGIMES over the five fees."""
    return [
        SimConfig.from_bps(bps, p=p, p_small=ps, seed=seed, y0=y0, alpha=alpha, epsilon_rel=epsilon_rel)
        for p, ps in AGENT_REGIMES
        for bps in FEE_GRID_BPS
    ]


def gbm_path(s0: float, mu: float, sigma: float, n: int, dt: float, seed: int = 0) -> PricePath:
    """Geometric Brownian motion sampled at ``n + 1`` points ``0, dt, ..., n*dt``."""
    if not (s0 > 0 and sigma >= 0 and dt > 0 and n >= 1):
        raise InvalidParams(f"need s0 > 0, sigma >= 0, dt > 0, n >= 1; got s0={s0!r}, sigma={sigma!r}, dt={dt!r}, n={n!r}")
    z = np.random.Generator(np.random.PCG64(seed)).standard_normal(n)
    steps = (mu - 0.5 * sigma**2) * dt + sigma * math.sqrt(dt) * z
    log_s = np.concatenate(([0.0], np.cumsum(steps)))
    return PricePath(dt * np.arange(n + 1, dtype=np.float64), s0 * np.exp(log_s))


def refine_path(prices: PricePath, levels: int, seed: int = 0, step_var: float | None = None) -> list[PricePath]:
    """Dyadic Brownian-bridge refinements of a path in log price.

    Returns ``levels + 1`` paths; each inserts a midpoint between every pair of
    neighbours of the previous one, drawn from the log-Brownian bridge, so
    coarser paths are exact subsamples of finer ones. ``step_var`` is the
    variance of one log increment on the input grid; by default it is the
    realised mean square log increment.
    """
    if len(prices) < 2:
        raise InvalidParams("need at least two observations to refine")
    if levels < 0:
        raise InvalidParams(f"levels must be >= 0, got {levels!r}")
    log_s = np.log(prices.prices)
    s, times = prices.prices, prices.times
    if step_var is None:
        step_var = float(np.mean(np.diff(log_s) ** 2))
    rng = np.random.Generator(np.random.PCG64(seed))
    out = [prices]
    var = step_var
    for _ in range(levels):
        m = len(log_s) - 1
        mid = 0.5 * (log_s[:-1] + log_s[1:]) + math.sqrt(var / 4.0) * rng.standard_normal(m)
        new_log = np.empty(2 * m + 1)
        new_log[0::2] = log_s
        new_log[1::2] = mid
        # existing points are copied, not re-exponentiated, so coarse paths are exact subsamples
        new_s = np.empty(2 * m + 1)
        new_s[0::2] = s
        new_s[1::2] = np.exp(mid)
        new_t = np.empty(2 * m + 1)
        new_t[0::2] = times
        new_t[1::2] = 0.5 * (times[:-1] + times[1:])
        log_s, s, times, var = new_log, new_s, new_t, var / 2.0
        out.append(PricePath(times, s))
    return out
