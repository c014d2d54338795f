"""Black-Scholes (zero rates) pricing and implied-volatility inversion.

Prices are handled through the time value ("excess") over intrinsic, which is
always the out-of-the-money option value. Writing ``x = |ln(K/S0)|``,
``s = theta sqrt(tau)``, ``z1 = x/s - s/2`` and ``z2 = x/s + s/2``,

    excess = sqrt(S0 K) e^{-x/2} phi(z1) int_{z1}^{z2} g(z) dz,
    g(z)   = 1 - z R(z),   R = Mills ratio,

which stays accurate when the excess is far below one ulp of the spot
(strikes off the money at expiries near 1e-6). ``d log(excess)/ds`` is
``1 / int g``, so Newton steps in log space cost nothing extra.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import kernels
from .errors import ArbitrageError, DomainError, NumericalError, UpperBoundError

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _normalized_log_otm(x: float, s: float) -> tuple[float, float]:
    """``(log b, d log b / ds)`` for the normalized out-of-the-money value ``b(x, s)``."""
    if s <= 0.0:
        return -math.inf, math.inf
    if math.isinf(s):
        return -0.5 * x, 0.0
    z1 = x / s - 0.5 * s
    z2 = x / s + 0.5 * s
    if z1 < -1.0:
        b = math.exp(-0.5 * x) * special.ndtr(-z1) - math.exp(0.5 * x) * special.ndtr(-z2)
        vega = math.exp(-0.5 * x - 0.5 * z1 * z1 - _LOG_SQRT_2PI)
        return math.log(b), vega / b
    if math.isinf(z1):
        return -math.inf, math.inf
    log_area = kernels.log_g_integral(z1, z2, s)
    log_b = -0.5 * x - 0.5 * z1 * z1 - _LOG_SQRT_2PI + log_area
    return log_b, (math.exp(-log_area) if log_area > -700.0 else math.inf)


def _check(s0, strike, tau):
    if not (s0 > 0 and strike > 0 and tau > 0):
        raise DomainError("S0, K and tau must be positive")
    if not (math.isfinite(s0) and math.isfinite(strike) and math.isfinite(tau)):
        raise DomainError("S0, K and tau must be finite")


def intrinsic(s0: float, strike: float) -> float:
    return max(s0 - strike, 0.0)


def log_bs_excess(s0: float, strike: float, tau: float, theta: float) -> float:
    """Natural log of the Black-Scholes call value minus intrinsic (``-inf`` at ``theta = 0``)."""
    _check(s0, strike, tau)
    if theta < 0:
        raise DomainError("volatility must be nonnegative")
    x = abs(math.log(strike / s0))
    log_b, _ = _normalized_log_otm(x, theta * math.sqrt(tau))
    return 0.5 * (math.log(s0) + math.log(strike)) + log_b


def bs_excess(s0: float, strike: float, tau: float, theta: float) -> float:
    """Call value minus intrinsic; equals the out-of-the-money option value."""
    return min(math.exp(log_bs_excess(s0, strike, tau, theta)), min(s0, strike))


def bs_call(s0: float, strike: float, tau: float, theta: float) -> float:
    """Zero-rate Black-Scholes call, ``S0 N(d1) - K N(d2)``; ``theta = 0`` gives intrinsic."""
    return intrinsic(s0, strike) + bs_excess(s0, strike, tau, theta)


def bs_vega(s0: float, strike: float, tau: float, theta: float) -> float:
    _check(s0, strike, tau)
    if theta <= 0:
        return 0.0
    sq = math.sqrt(tau)
    d1 = math.log(s0 / strike) / (theta * sq) + 0.5 * theta * sq
    return s0 * sq * math.exp(-0.5 * d1 * d1 - _LOG_SQRT_2PI)


@dataclass(frozen=True)
class IVPoint:
    tau: float
    sigma: float
    converged: bool
    iterations: int


THETA_LO = 1e-9
THETA_HI = 1.0
THETA_CAP = 2.0 ** 10


def implied_vol(price: float, s0: float, strike: float, tau: float, *,
                log_excess: float | None = None, max_iter: int = 200) -> IVPoint:
    """Black-Scholes volatility reproducing a call ``price``.

    ``log_excess``, when given, is the log of ``price - intrinsic`` computed by
    the caller at higher relative precision than the price itself; ``price``
    is then used only for the bound checks.
    """
    _check(s0, strike, tau)
    if not math.isfinite(price):
        raise DomainError("price must be finite")
    floor = intrinsic(s0, strike)
    if price < floor:
        raise ArbitrageError(f"price {price!r} is below intrinsic value {floor!r}")
    if price >= s0:
        raise UpperBoundError(f"price {price!r} is not below the spot {s0!r}")
    if log_excess is None:
        excess = price - floor
        if excess == 0.0:
            return IVPoint(tau, 0.0, True, 0)
        log_excess = math.log(excess)
    elif log_excess == -math.inf:
        return IVPoint(tau, 0.0, True, 0)

    x = abs(math.log(strike / s0))
    target = log_excess - 0.5 * (math.log(s0) + math.log(strike))
    if target >= -0.5 * x:
        raise UpperBoundError("excess reaches the upper bound min(S0, K)")
    sq = math.sqrt(tau)
    # 1/sqrt(-2 log b) is close to linear in s (~ s/x off the money)
    goal = 1.0 / math.sqrt(-2.0 * target)

    def f(theta):
        lb, dlb = _normalized_log_otm(x, theta * sq)
        if lb == -math.inf:
            return -goal, math.inf
        q = -2.0 * lb
        val = 1.0 / math.sqrt(q)
        return val - goal, val / q * dlb * sq

    iterations = 0
    lo, hi = THETA_LO, THETA_HI
    f_lo, _ = f(lo)
    while f_lo > 0.0:
        lo *= 1e-3
        iterations += 1
        if lo < 1e-300:
            raise NumericalError("could not bracket the implied volatility from below")
        f_lo, _ = f(lo)
    f_hi, _ = f(hi)
    while f_hi < 0.0:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        iterations += 1
        if hi > THETA_CAP:
            raise NumericalError(f"implied volatility exceeds {THETA_CAP:g}")
        f_hi, _ = f(hi)

    # secant on the bracket as a start, then safeguarded Newton
    theta = lo - f_lo * (hi - lo) / (f_hi - f_lo)
    if not lo < theta < hi:
        theta = 0.5 * (lo + hi)
    tiny = 4.0 * np.finfo(float).eps
    for _ in range(max_iter):
        iterations += 1
        fv, d = f(theta)
        if fv == 0.0:
            return IVPoint(tau, theta, True, iterations)
        if fv > 0.0:
            hi = theta
        else:
            lo = theta
        cand = theta - fv / d if 0.0 < d < math.inf else math.nan
        if not lo < cand < hi:
            cand = math.sqrt(lo * hi) if hi > 4.0 * lo else 0.5 * (lo + hi)
        if abs(cand - theta) <= tiny * theta or hi - lo <= tiny * hi:
            return IVPoint(tau, cand, True, iterations)
        theta = cand
    return IVPoint(tau, theta, False, iterations)


def rr_limit_value(excess: float, s0: float, strike: float, tau: float) -> float:
    """``|ln(K/S0)| / sqrt(-2 tau ln(excess))`` for ``0 < excess < 1``."""
    if not 0.0 < excess < 1.0:
        raise DomainError("the limit functional needs 0 < excess < 1")
    return rr_limit_from_log(math.log(excess), s0, strike, tau)


def rr_limit_from_log(log_excess: float, s0: float, strike: float, tau: float) -> float:
    """Same functional taking ``ln(excess)`` directly (must be negative)."""
    _check(s0, strike, tau)
    if s0 == strike:
        raise DomainError("at-the-money strikes (K = S0) are excluded")
    if not log_excess < 0.0:
        raise DomainError("the limit functional needs 0 < excess < 1")
    if math.isinf(log_excess):
        raise DomainError("zero excess: the implied volatility tends to 0 instead")
    return abs(math.log(strike / s0)) / math.sqrt(-2.0 * tau * log_excess)
