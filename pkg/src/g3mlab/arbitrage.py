"""Profit-maximising arbitrage against an external price."""
from __future__ import annotations

import math
from dataclasses import dataclass

from g3mlab.amm import PoolState, Quote, Trade, TradeKind, apply_swap, apply_swap_y, quote
from g3mlab.errors import InvalidPrice


@dataclass(frozen=True)
class ArbOutcome:
    trade: Trade | None
    profit: float
    post_quote: Quote
    pool: PoolState


def arb_profit(trade: Trade, s_star: float) -> float:
    """Arbitrageur profit in Y when the X leg is settled externally at ``s_star``."""
    return -trade.dy - s_star * trade.dx


def optimal_arb(pool: PoolState, s_star: float) -> ArbOutcome:
    """Execute the profit-maximising trade if ``s_star`` lies outside the pool's band.

    Below the bid the arbitrageur sells X to the pool,
    ``dx = x/(1-tau) * ((bid/s_star)**(1-alpha) - 1)``; above the ask they
    pay in Y, ``dy = y/(1-tau) * ((s_star/ask)**alpha - 1)``. Both sizes set the
    fee-inclusive marginal rate equal to ``s_star`` and leave the external
    price strictly inside the new band. A price on the band edge is not an
    opportunity.
    """
    if not (s_star > 0 and math.isfinite(s_star)):
        raise InvalidPrice(f"external price must be positive and finite, got {s_star!r}")
    q = quote(pool)
    c = 1.0 - pool.tau
    if s_star < q.bid:
        dx = pool.x * math.expm1((1.0 - pool.alpha) * math.log(q.bid / s_star)) / c
        new_pool, trade = apply_swap(pool, dx, TradeKind.ARBITRAGE)
    elif s_star > q.ask:
        dy = pool.y * math.expm1(pool.alpha * math.log(s_star / q.ask)) / c
        new_pool, trade = apply_swap_y(pool, dy, TradeKind.ARBITRAGE)
    else:
        return ArbOutcome(None, 0.0, q, pool)
    if trade.is_null:
        return ArbOutcome(None, 0.0, q, pool)
    return ArbOutcome(trade, arb_profit(trade, s_star), quote(new_pool), new_pool)
