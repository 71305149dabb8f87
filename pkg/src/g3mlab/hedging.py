"""Impermanent loss, its model-free rebalancing hedge, and the no-fee LVR term."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from g3mlab.amm import PoolState
from g3mlab.data import PricePath
from g3mlab.errors import FeeNotZero, InvalidPrice


def pool_value(x: float, y: float, s_star: float) -> float:
    return y + x * s_star


def impermanent_loss(pool0: PoolState, pool_t: PoolState, s_star_t: float) -> float:
    """Buy-and-hold value of the initial reserves minus the pool's value, in Y."""
    if not s_star_t > 0:
        raise InvalidPrice(f"external price must be positive, got {s_star_t!r}")
    return pool0.y + pool0.x * s_star_t - pool_value(pool_t.x, pool_t.y, s_star_t)


def psi_no_fee(s, x0: float, y0: float, alpha: float):
    """Closed-form impermanent loss of a fee-free pool as a function of the price.

    ``y0 + x0*s - (1 + beta)/beta**alpha * L * s**alpha`` with
    ``L = x0**alpha * y0**(1-alpha)``. Accepts scalars or arrays.
    """
    beta = alpha / (1.0 - alpha)
    L = x0**alpha * y0 ** (1.0 - alpha)
    return y0 + x0 * s - (1.0 + beta) / beta**alpha * L * np.power(s, alpha)


@dataclass(frozen=True)
class HedgeLedger:
    x_prev: float
    s_prev: float
    psi_hat: float = 0.0


def hedge_step(ledger: HedgeLedger, x0: float, x_curr: float, s_curr: float) -> HedgeLedger:
    """One rebalance of the short ``x0 - x`` hedge.

    The position held over the period is the one set at the previous step,
    i.e. the reserves before this period's trades.
    """
    psi_hat = ledger.psi_hat + (x0 - ledger.x_prev) * (s_curr - ledger.s_prev)
    return replace(ledger, psi_hat=psi_hat, x_prev=x_curr, s_prev=s_curr)


def hedge_path(x0: float, X, prices) -> np.ndarray:
    """Running hedge value ``sum_i (x0 - X[i-1]) * (S[i] - S[i-1])`` along whole paths."""
    X = np.asarray(X, dtype=np.float64)
    S = np.asarray(prices, dtype=np.float64)
    out = np.zeros(len(S))
    out[1:] = np.cumsum((x0 - X[:-1]) * np.diff(S))
    return out


@dataclass(frozen=True)
class ILReport:
    V_T: float
    Psi_T: float
    psi_hat_T: float
    rel_err: float


def il_report(x0: float, y0: float, x_T: float, y_T: float, s_T: float, psi_hat_T: float) -> ILReport:
    """Terminal accounting; ``rel_err`` is relative to the buy-and-hold value ``V_T + Psi_T``."""
    V_T = pool_value(x_T, y_T, s_T)
    Psi_T = y0 + x0 * s_T - V_T
    return ILReport(V_T=V_T, Psi_T=Psi_T, psi_hat_T=psi_hat_T, rel_err=(psi_hat_T - Psi_T) / (V_T + Psi_T))


def lvr(prices: PricePath, pool0: PoolState) -> float:
    """Discretised loss-versus-rebalancing of a fee-free pool.

    ``sum_i 1/2 (1-alpha)**alpha alpha**(1-alpha) L S_{i-1}**alpha (dlog S_i)**2``,
    with the integrand taken at the left end of each step.
    """
    if pool0.tau != 0:
        raise FeeNotZero("loss-versus-rebalancing is only defined here for a fee-free pool")
    alpha = pool0.alpha
    L = pool0.geometric_mean
    s = prices.prices
    dlog = np.diff(np.log(s))
    coef = 0.5 * (1.0 - alpha) ** alpha * alpha ** (1.0 - alpha) * L
    return float(coef * np.sum(s[:-1] ** alpha * dlog**2))
