"""Two-asset geometric mean market maker with a proportional fee.

Reserves ``(x, y)`` trade under the fee-adjusted rule

    (x + (1 - tau*H(dx))*dx)**alpha * (y + (1 - tau*H(dy))*dy)**(1 - alpha)
        == x**alpha * y**(1 - alpha)

where ``H`` is the Heaviside step: the fee is taken on the incoming asset only,
and reserves are then updated by the full amounts ``(x + dx, y + dy)``.
Sign convention throughout: ``dx``/``dy`` are amounts *added to* the pool.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from g3mlab.errors import DxOutOfRange, InvalidPool, NoArbViolatedOnEntry, NotOppositeDirections

BISECT_RTOL = 1e-12
BISECT_MAXITER = 200


@dataclass(frozen=True)
class PoolState:
    x: float
    y: float
    alpha: float
    tau: float

    def __post_init__(self):
        if not (self.x > 0 and math.isfinite(self.x)):
            raise InvalidPool(f"x must be positive and finite, got {self.x!r}")
        if not (self.y > 0 and math.isfinite(self.y)):
            raise InvalidPool(f"y must be positive and finite, got {self.y!r}")
        if not 0 < self.alpha < 1:
            raise InvalidPool(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not 0 <= self.tau < 1:
            raise InvalidPool(f"tau must lie in [0, 1), got {self.tau!r}")

    @property
    def beta(self) -> float:
        return self.alpha / (1.0 - self.alpha)

    @property
    def mid(self) -> float:
        """Fee-free marginal price of X in units of Y."""
        return self.beta * self.y / self.x

    @property
    def geometric_mean(self) -> float:
        return math.exp(self.alpha * math.log(self.x) + (1.0 - self.alpha) * math.log(self.y))

    def with_reserves(self, x: float, y: float) -> "PoolState":
        return PoolState(x, y, self.alpha, self.tau)

    @classmethod
    def at_price(cls, y: float, price: float, alpha: float, tau: float) -> "PoolState":
        """Pool holding ``y`` of the quote asset whose mid price equals ``price``."""
        beta = alpha / (1.0 - alpha)
        return cls(beta * y / price, y, alpha, tau)


@dataclass(frozen=True)
class Quote:
    bid: float
    ask: float
    mid: float

    def encloses(self, price: float, rtol: float = 0.0) -> bool:
        # boundaries count as inside
        return self.bid * (1.0 - rtol) <= price <= self.ask * (1.0 + rtol)


class TradeKind(enum.Enum):
    SMALL = "small"
    LARGE = "large"
    ARBITRAGE = "arbitrage"


@dataclass(frozen=True)
class Trade:
    dx: float
    dy: float
    kind: TradeKind
    fee_paid: float

    @property
    def is_null(self) -> bool:
        return self.dx == 0.0 and self.dy == 0.0

    @property
    def fee_asset(self) -> str | None:
        """Which asset the fee was charged in ("x", "y"), or None for a null trade."""
        if self.dx > 0:
            return "x"
        if self.dy > 0:
            return "y"
        return None


def quote(pool: PoolState) -> Quote:
    mid = pool.mid
    return Quote(bid=(1.0 - pool.tau) * mid, ask=mid / (1.0 - pool.tau), mid=mid)


def fee_adjusted_mean(pool: PoolState, dx: float, dy: float) -> float:
    """Left-hand side of the trading rule for a candidate update ``(dx, dy)``."""
    tau = pool.tau
    ex = pool.x + ((1.0 - tau) * dx if dx > 0 else dx)
    ey = pool.y + ((1.0 - tau) * dy if dy > 0 else dy)
    return math.exp(pool.alpha * math.log(ex) + (1.0 - pool.alpha) * math.log(ey))


def _is_null(reserve: float, amount: float) -> bool:
    return reserve + amount == reserve


def swap_out(pool: PoolState, dx: float) -> float:
    """Signed amount of Y added to the pool when ``dx`` of X is added.

    ``dx > 0`` sells X into the pool (fee on X) and the result is negative;
    ``dx < 0`` withdraws X against incoming Y (fee on Y) and the result is positive.
    """
    x, y, tau, beta = pool.x, pool.y, pool.tau, pool.beta
    if not math.isfinite(dx):
        raise DxOutOfRange(f"dx must be finite, got {dx!r}")
    if dx <= -x:
        raise DxOutOfRange(f"dx={dx!r} would drain the X reserve x={x!r}")
    if _is_null(x, dx):
        return 0.0
    if dx > 0:
        # -dy = y * (1 - (x / (x + (1-tau) dx))**beta)
        return y * math.expm1(-beta * math.log1p((1.0 - tau) * dx / x))
    # -dy = y/(1-tau) * (1 - (x / (x + dx))**beta), negative since dx < 0
    return y * math.expm1(-beta * math.log1p(dx / x)) / (1.0 - tau)


def dx_for_dy(pool: PoolState, dy: float) -> float:
    """Inverse direction of :func:`swap_out`: signed X added when ``dy`` of Y is added."""
    x, y, tau = pool.x, pool.y, pool.tau
    inv_beta = 1.0 / pool.beta
    if not math.isfinite(dy):
        raise DxOutOfRange(f"dy must be finite, got {dy!r}")
    if dy <= -y:
        raise DxOutOfRange(f"dy={dy!r} would drain the Y reserve y={y!r}")
    if _is_null(y, dy):
        return 0.0
    if dy > 0:
        return x * math.expm1(-inv_beta * math.log1p((1.0 - tau) * dy / y))
    return x * math.expm1(-inv_beta * math.log1p(dy / y)) / (1.0 - tau)


def _trade(dx: float, dy: float, kind: TradeKind, tau: float) -> Trade:
    incoming = dx if dx > 0 else (dy if dy > 0 else 0.0)
    return Trade(dx=dx, dy=dy, kind=kind, fee_paid=tau * incoming)


def apply_swap(pool: PoolState, dx: float, kind: TradeKind = TradeKind.SMALL) -> tuple[PoolState, Trade]:
    dy = swap_out(pool, dx)
    if dy == 0.0:
        return pool, Trade(0.0, 0.0, kind, 0.0)
    return pool.with_reserves(pool.x + dx, pool.y + dy), _trade(dx, dy, kind, pool.tau)


def apply_swap_y(pool: PoolState, dy: float, kind: TradeKind = TradeKind.SMALL) -> tuple[PoolState, Trade]:
    """Like :func:`apply_swap` but specified by the amount of Y added."""
    dx = dx_for_dy(pool, dy)
    if dx == 0.0:
        return pool, Trade(0.0, 0.0, kind, 0.0)
    return pool.with_reserves(pool.x + dx, pool.y + dy), _trade(dx, dy, kind, pool.tau)


def marginal_rate(pool: PoolState, dx: float) -> float:
    """Derivative of ``-swap_out(pool, z)`` with respect to ``z`` at ``z = dx``.

    At ``dx = 0`` this is the bid from the right; use a negative ``dx`` to probe
    the ask side.
    """
    x, y, tau, beta = pool.x, pool.y, pool.tau, pool.beta
    if dx >= 0:
        return (1.0 - tau) * beta * y / x * math.exp(-(beta + 1.0) * math.log1p((1.0 - tau) * dx / x))
    return beta * y / ((1.0 - tau) * x) * math.exp(-(beta + 1.0) * math.log1p(dx / x))


def block_vs_split(pool: PoolState, dx1: float, dx2: float) -> tuple[float, float]:
    """Y received by one block order ``dx1 + dx2`` versus the two legs in sequence.

    Returns ``(block_out, split_out)``. For opposite-direction legs and a
    positive fee the split is strictly worse.
    """
    if not dx1 * dx2 < 0:
        raise NotOppositeDirections(f"legs must have opposite signs, got {dx1!r} and {dx2!r}")
    block_out = -swap_out(pool, dx1 + dx2)
    dy1 = swap_out(pool, dx1)
    after = pool.with_reserves(pool.x + dx1, pool.y + dy1)
    dy2 = swap_out(after, dx2)
    return block_out, -dy1 - dy2


def _bisect_increasing(h, target: float, hi: float) -> float:
    """Largest ``u >= 0`` with ``h(u) <= target`` for increasing ``h`` with ``h(0) = 0``.

    Returns the feasible end of the final bracket.
    """
    if target <= 0.0:
        return 0.0
    lo = 0.0
    while h(hi) <= target:
        lo, hi = hi, 2.0 * hi
    for _ in range(BISECT_MAXITER):
        if hi - lo <= BISECT_RTOL * hi:
            break
        m = 0.5 * (lo + hi)
        if h(m) <= target:
            lo = m
        else:
            hi = m
    return lo


def _check_inside(pool: PoolState, s_star: float) -> Quote:
    q = quote(pool)
    if not q.encloses(s_star):
        raise NoArbViolatedOnEntry(f"s_star={s_star!r} outside [{q.bid!r}, {q.ask!r}]")
    return q


def max_small_sell(pool: PoolState, s_star: float) -> float:
    """Largest X amount that can be sold into the pool without pushing its ask below ``s_star``."""
    q = _check_inside(pool, s_star)
    beta, c = pool.beta, 1.0 - pool.tau
    # log(ask/ask') as a function of u = dx/x
    def drop(u):
        return beta * math.log1p(c * u) + math.log1p(u)

    return pool.x * _bisect_increasing(drop, math.log(q.ask / s_star), 1.0)


def max_small_buy(pool: PoolState, s_star: float) -> float:
    """Largest Y amount that can be paid into the pool without lifting its bid above ``s_star``."""
    q = _check_inside(pool, s_star)
    inv_beta, c = 1.0 / pool.beta, 1.0 - pool.tau

    def rise(v):
        return math.log1p(v) + inv_beta * math.log1p(c * v)

    return pool.y * _bisect_increasing(rise, math.log(s_star / q.bid), 1.0)
