import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from g3mlab.amm import PoolState, Trade, TradeKind, apply_swap, marginal_rate, quote, swap_out
from g3mlab.arbitrage import arb_profit, optimal_arb
from g3mlab.errors import InvalidPrice

from oracles import golden_max

POOL = PoolState(100, 100, 0.5, 0.003)


def _profit_selling_x(pool, dx, s):
    """Arbitrageur buys X externally and sells it to the pool (pool receives dx > 0)."""
    beta = pool.beta
    y_out = pool.y * (1 - (pool.x / (pool.x + (1 - pool.tau) * dx)) ** beta)
    return y_out - s * dx


def _profit_buying_x(pool, dy, s):
    """Arbitrageur pays dy > 0 of Y to the pool and sells the X received externally."""
    inv_beta = 1 / pool.beta
    x_out = pool.x * (1 - (pool.y / (pool.y + (1 - pool.tau) * dy)) ** inv_beta)
    return s * x_out - dy


def test_inside_band_no_trade():
    for s in (quote(POOL).bid, 1.0, quote(POOL).ask):
        out = optimal_arb(POOL, s)
        assert out.trade is None and out.profit == 0.0
        assert out.pool is POOL
        assert out.post_quote == quote(POOL)


def test_below_bid_closed_form():
    out = optimal_arb(POOL, 0.9)
    expected = (100 / 0.997) * (math.sqrt(0.997 / 0.9) - 1)
    assert out.trade.dx == pytest.approx(expected, rel=1e-13)
    assert out.trade.dx == pytest.approx(5.266823161798363, rel=1e-12)
    # golden-section maximisation of the profit over the X amount
    oracle = golden_max(lambda d: _profit_selling_x(POOL, d, 0.9), 0.0, POOL.x)
    assert out.trade.dx == pytest.approx(oracle, rel=1e-6)
    assert out.trade.kind is TradeKind.ARBITRAGE


def test_above_ask_closed_form():
    out = optimal_arb(POOL, 1.1)
    a = 1 / 0.997
    expected = (100 / 0.997) * (math.sqrt(1.1 / a) - 1)
    assert out.trade.dy == pytest.approx(expected, rel=1e-13)
    # golden-section oracle gives 4.737658283621123
    oracle = golden_max(lambda d: _profit_buying_x(POOL, d, 1.1), 0.0, POOL.y)
    assert out.trade.dy == pytest.approx(oracle, rel=1e-6)
    assert out.trade.dy == pytest.approx(4.737658296364264, rel=1e-12)


def test_invalid_price():
    for s in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(InvalidPrice):
            optimal_arb(POOL, s)


def test_profit_of_null_trade():
    assert arb_profit(Trade(0.0, 0.0, TradeKind.ARBITRAGE, 0.0), 1.23) == 0.0


def test_profit_positive_and_half_size_worse():
    out = optimal_arb(POOL, 0.9)
    assert out.profit == pytest.approx(arb_profit(out.trade, 0.9))
    assert out.profit > 0
    _, half = apply_swap(POOL, 0.5 * out.trade.dx)
    assert arb_profit(half, 0.9) < out.profit
    grid = np.linspace(0, 2 * out.trade.dx, 1001)
    grid_profit = [_profit_selling_x(POOL, d, 0.9) for d in grid]
    assert max(grid_profit) <= out.profit + 1e-12


@st.composite
def violated(draw):
    x = draw(st.floats(min_value=1e-2, max_value=1e6))
    y = draw(st.floats(min_value=1e-2, max_value=1e6))
    pool = PoolState(x, y, draw(st.floats(0.05, 0.95)), draw(st.floats(0.0, 0.1)))
    q = quote(pool)
    gap = draw(st.floats(min_value=1e-6, max_value=3.0))
    s = q.bid * math.exp(-gap) if draw(st.booleans()) else q.ask * math.exp(gap)
    return pool, s


@settings(max_examples=400)
@given(violated())
def test_restores_no_arbitrage(case):
    pool, s = case
    out = optimal_arb(pool, s)
    assert out.trade is not None
    # at tau = 0 the band is a single point, so allow a few ulps
    assert out.post_quote.bid * (1 - 1e-14) <= s <= out.post_quote.ask * (1 + 1e-14)
    assert out.pool.x > 0 and out.pool.y > 0
    scale = abs(out.trade.dy) + s * abs(out.trade.dx)
    assert out.profit >= -1e-13 * scale


@settings(max_examples=400)
@given(violated())
def test_first_order_condition(case):
    pool, s = case
    out = optimal_arb(pool, s)
    assert marginal_rate(pool, out.trade.dx) == pytest.approx(s, rel=1e-9)


@settings(max_examples=300)
@given(violated())
def test_idempotent(case):
    pool, s = case
    first = optimal_arb(pool, s)
    second = optimal_arb(first.pool, s)
    if second.trade is not None:  # rounding-level residue only
        assert abs(second.trade.dx) <= 1e-13 * first.pool.x
        assert abs(second.profit) <= 1e-13 * (first.pool.y + s * first.pool.x)


@settings(max_examples=200)
@given(violated(), st.floats(min_value=0.0, max_value=3.0))
def test_alternative_sizes_never_better(case, scale):
    pool, s = case
    out = optimal_arb(pool, s)
    alt_dx = scale * out.trade.dx
    assume(alt_dx > -pool.x * (1 - 1e-9))
    alt = -swap_out(pool, alt_dx) - s * alt_dx
    tol = 1e-12 * (abs(out.trade.dy) + s * abs(out.trade.dx))
    assert alt <= out.profit + tol
