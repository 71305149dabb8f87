"""Arbitrage-only reserve dynamics via two-sided reflection.

With continuous arbitrage the log distance of the external price from the
pool's bid, ``phi = log(S* / ((1 - tau) S))``, is the reflection of

    psi = log S* - log S0 - log(1 - tau)

on ``[0, a]`` with ``a = -2 log(1 - tau)``. The pushes at the lower and upper
barrier (``eta_up``, ``eta_down``) determine the reserves in closed form:

    X = x0 * exp(eta_up / (1 + (1-tau) beta) - eta_down / (1 + beta/(1-tau)))
    dY/Y = -(1-tau) beta dX_up/X + beta/(1-tau) dX_down/X
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from g3mlab.amm import PoolState, quote
from g3mlab.arbitrage import optimal_arb
from g3mlab.data import PricePath
from g3mlab.errors import InitialArbitrage, InitialOutOfBand, InvalidParams

# "phi is at a barrier" tolerance in log units
GRID_TOL = 1e-12
# slack for the initial band check; a fee-free pool set to a price can miss it by an ulp
INITIAL_RTOL = 1e-12


def barrier_width(tau: float) -> float:
    return -2.0 * math.log1p(-tau)


@dataclass(frozen=True, eq=False)
class ReflectionSolution:
    phi: np.ndarray
    eta_up: np.ndarray
    eta_down: np.ndarray
    a: float


@dataclass(frozen=True, eq=False)
class ReservePaths:
    X: np.ndarray
    Y: np.ndarray
    S: np.ndarray


def solve_reflection(psi, a: float) -> ReflectionSolution:
    """Discrete two-sided Skorokhod map of ``psi`` onto ``[0, a]``.

    Each increment of ``psi`` is added and the result clamped to the band; the
    clamped-off amounts accumulate into ``eta_up`` (lower barrier) and
    ``eta_down`` (upper barrier). This is exact for the piecewise-linear
    interpolation of ``psi``. ``a = 0`` is allowed and pins ``phi`` to 0.
    """
    psi = np.asarray(psi, dtype=np.float64)
    if psi.ndim != 1 or len(psi) == 0:
        raise InvalidParams("psi must be a non-empty 1-d path")
    if not (a >= 0 and math.isfinite(a)):
        raise InvalidParams(f"barrier width must be non-negative, got {a!r}")
    if not 0.0 <= psi[0] <= a:
        raise InitialOutOfBand(f"psi_0={psi[0]!r} outside [0, {a!r}]")

    n = len(psi)
    phi = np.empty(n)
    up = np.zeros(n)
    down = np.zeros(n)
    increments = np.diff(psi).tolist()
    cur = float(psi[0])
    cum_up = cum_down = 0.0
    phi[0] = cur
    for i, d in enumerate(increments, start=1):
        cur += d
        if cur < 0.0:
            cum_up -= cur
            cur = 0.0
        elif cur > a:
            cum_down += cur - a
            cur = a
        phi[i] = cur
        up[i] = cum_up
        down[i] = cum_down
    return ReflectionSolution(phi=phi, eta_up=up, eta_down=down, a=a)


def reserves_from_reflection(x0: float, y0: float, alpha: float, tau: float, sol: ReflectionSolution) -> ReservePaths:
    beta = alpha / (1.0 - alpha)
    c = 1.0 - tau
    k_up = 1.0 / (1.0 + c * beta)
    k_down = 1.0 / (1.0 + beta / c)
    # dX_up/X = k_up d(eta_up), dX_down/X = k_down d(eta_down)
    log_x = k_up * sol.eta_up - k_down * sol.eta_down
    log_y = -c * beta * k_up * sol.eta_up + (beta / c) * k_down * sol.eta_down
    X = x0 * np.exp(log_x)
    Y = y0 * np.exp(log_y)
    return ReservePaths(X=X, Y=Y, S=beta * Y / X)


def reflection_input(pool0: PoolState, prices: PricePath) -> np.ndarray:
    """The free path ``psi`` for a pool and an external price path."""
    return np.log(prices.prices) - math.log(pool0.mid) - math.log1p(-pool0.tau)


def continuous_arb_dynamics(pool0: PoolState, prices: PricePath) -> ReservePaths:
    """Reserve paths under continuous arbitrage only, sampled on the price grid."""
    s0 = float(prices.prices[0])
    if not quote(pool0).encloses(s0, rtol=INITIAL_RTOL):
        raise InitialArbitrage(f"initial external price {s0!r} lies outside the pool's bid/ask band")
    psi = reflection_input(pool0, prices)
    a = barrier_width(pool0.tau)
    # the quote check above can pass while rounding in psi_0 lands a hair outside
    psi[0] = min(max(psi[0], 0.0), a)
    sol = solve_reflection(psi, a)
    return reserves_from_reflection(pool0.x, pool0.y, pool0.alpha, pool0.tau, sol)


def iterated_arb_dynamics(pool0: PoolState, prices: PricePath) -> ReservePaths:
    """Same grid, but with one discrete optimal arbitrage trade per observation."""
    n = len(prices)
    X = np.empty(n)
    Y = np.empty(n)
    pool = pool0
    for i, s in enumerate(prices.prices.tolist()):
        if i:
            pool = optimal_arb(pool, s).pool
        X[i] = pool.x
        Y[i] = pool.y
    return ReservePaths(X=X, Y=Y, S=pool0.beta * Y / X)


def band_position(paths: ReservePaths, prices: PricePath, tau: float) -> np.ndarray:
    """``log(S* / ((1 - tau) S))`` along the path; lies in ``[0, a]`` without arbitrage."""
    return np.log(prices.prices / paths.S) - math.log1p(-tau)


def complementarity_violation(sol: ReflectionSolution, tol: float = GRID_TOL) -> float:
    """Total push applied while ``phi`` was off the corresponding barrier."""
    d_up = np.diff(sol.eta_up)
    d_down = np.diff(sol.eta_down)
    off_low = sol.phi[1:] > tol
    off_high = sol.phi[1:] < sol.a - tol
    return float(np.sum(d_up[off_low]) + np.sum(d_down[off_high]))
