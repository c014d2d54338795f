"""Payoff integrals against the Levy density, chiefly the small-expiry slopes

    I_c = int (S0 e^x - K)^+ nu(x) dx,    I_p = int (K - S0 e^x)^+ nu(x) dx.

The kink ``x = k = ln(K/S0)`` always sits on a panel boundary and unbounded
tails go through the rational substitution of :mod:`gausskronrod`, scaled by
the model's tail decay length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import gausskronrod
from .errors import DomainError
from .models import (SUPPORT_NEGATIVE, SUPPORT_NONE, SUPPORT_POSITIVE, Kou, LevyModel, Merton,
                     ensure_valid)

ABS_TOL = 1e-12
REL_TOL = 1e-9
MAX_SUBDIVISIONS = 2000


@dataclass(frozen=True)
class SlopeResult:
    """Both slopes at one strike.

    The in-the-money side integrand does not vanish at the origin, so for
    infinite-activity models that side is reported as ``inf``.
    """

    I_c: float
    I_p: float
    err_c: float
    err_p: float
    k: float

    @property
    def relevant(self) -> float:
        """The slope governing the excess: ``I_c`` above the spot, ``I_p`` below."""
        return self.I_c if self.k > 0 else self.I_p


def _tail_scale(model: LevyModel, upper: bool) -> float:
    rng = model.jump_range()
    if rng is not None:
        return max(rng[1] - rng[0], 1e-3) / 24.0
    down, up = model.tail_rates()
    rate = up if upper else down
    return 1.0 / rate if math.isfinite(rate) and rate > 0 else 1.0


def _guarded(values, dens):
    # e^x overflow against an underflowed density is 0, not nan
    out = np.where(dens == 0.0, 0.0, values)
    return out


def integrate_payoff(f, model: LevyModel, domain, *, abs_tol=ABS_TOL, rel_tol=REL_TOL,
                     max_subdivisions=MAX_SUBDIVISIONS):
    """``int_domain f(x) nu(x) dx`` for a half-line or interval ``domain = (lo, hi)``.

    ``f`` takes and returns arrays. For infinite-activity models the closed
    domain must stay away from 0; finite-activity densities are bounded, so
    the domain is split at 0 instead.

    Returns ``(value, err)``; raises ``IntegrationError`` on non-convergence.
    """
    lo, hi = (float(domain[0]), float(domain[1]))
    if not lo < hi:
        raise DomainError(f"empty integration domain ({lo}, {hi})")
    ensure_valid(model)
    if model.support == SUPPORT_NONE:
        return 0.0, 0.0
    if lo <= 0.0 <= hi:
        if model.total_intensity is None:
            raise DomainError("domain touches 0, where an infinite-activity density is not integrable")
        pieces = [(lo, 0.0), (0.0, hi)]
    else:
        pieces = [(lo, hi)]
    if model.support == SUPPORT_POSITIVE:
        pieces = [(max(a, 0.0), b) for a, b in pieces if b > 0.0]
    elif model.support == SUPPORT_NEGATIVE:
        pieces = [(a, min(b, 0.0)) for a, b in pieces if a < 0.0]

    def integrand(x):
        dens = model.density(x)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(f(x), dtype=float) * dens
        return _guarded(vals, dens)

    total, err = 0.0, 0.0
    for a, b in pieces:
        if a == b:
            continue
        scale = _tail_scale(model, upper=math.isinf(b))
        v, e = gausskronrod.integrate(integrand, a, b, abs_tol=abs_tol, rel_tol=rel_tol,
                                      max_subdivisions=max_subdivisions, scale=scale)
        total += v
        err += e
    return total, err


def _check_market(s0, strike):
    if not (s0 > 0 and strike > 0 and math.isfinite(s0) and math.isfinite(strike)):
        raise DomainError("spot and strike must be positive and finite")
    if s0 == strike:
        raise DomainError("at-the-money strikes (K = S0) are excluded")
    return math.log(strike / s0)


def slope_call(model: LevyModel, s0: float, strike: float):
    """``(I_c, err)`` with ``I_c = int_k^inf (S0 e^x - K) nu(x) dx``."""
    k = _check_market(s0, strike)

    def payoff(x):
        with np.errstate(over="ignore"):
            return s0 * np.exp(x) - strike

    return integrate_payoff(payoff, model, (k, math.inf))


def slope_put(model: LevyModel, s0: float, strike: float):
    """``(I_p, err)`` with ``I_p = int_-inf^k (K - S0 e^x) nu(x) dx``."""
    k = _check_market(s0, strike)
    return integrate_payoff(lambda x: strike - s0 * np.exp(x), model, (-math.inf, k))


def slopes(model: LevyModel, s0: float, strike: float) -> SlopeResult:
    k = _check_market(s0, strike)
    infinite = model.total_intensity is None and model.support != SUPPORT_NONE
    if k < 0 and infinite:
        ic, ec = math.inf, 0.0
    else:
        ic, ec = slope_call(model, s0, strike)
    if k > 0 and infinite:
        ip, ep = math.inf, 0.0
    else:
        ip, ep = slope_put(model, s0, strike)
    return SlopeResult(I_c=ic, I_p=ip, err_c=ec, err_p=ep, k=k)


# ---------------------------------------------------------------------------
# closed forms used as oracles


def closed_form_slopes(model: LevyModel, s0: float, strike: float) -> tuple[float, float]:
    """Exact ``(I_c, I_p)`` for Merton and Kou; valid on both sides of the spot."""
    k = _check_market(s0, strike)
    if isinstance(model, Merton):
        lam, m, d = model.lam, model.mu_j, model.delta_j
        growth = s0 * math.exp(m + 0.5 * d * d)
        ic = lam * (growth * special.ndtr((m + d * d - k) / d) - strike * special.ndtr((m - k) / d))
        ip = lam * (strike * special.ndtr((k - m) / d) - growth * special.ndtr((k - m - d * d) / d))
        return float(ic), float(ip)
    if isinstance(model, Kou):
        lam, p, e1, e2 = model.lam, model.p, model.eta1, model.eta2
        if k >= 0:
            ic = lam * p * strike * (s0 / strike) ** e1 / (e1 - 1.0)
            # put side splits at 0: the down-jump half and the bounded up-jump piece
            ip = lam * (1.0 - p) * ((strike - s0) + s0 / (e2 + 1.0))
            ip += lam * p * (strike * (-math.expm1(-e1 * k))
                             - s0 * e1 * (1.0 - math.exp((1.0 - e1) * k)) / (e1 - 1.0))
        else:
            ip = lam * (1.0 - p) * strike * (strike / s0) ** e2 / (e2 + 1.0)
            ic = lam * p * ((s0 - strike) + s0 / (e1 - 1.0))
            ic += lam * (1.0 - p) * (s0 * e2 * (1.0 - math.exp((e2 + 1.0) * k)) / (e2 + 1.0)
                                     - strike * (-math.expm1(e2 * k)))
        return float(ic), float(ip)
    raise DomainError(f"no closed-form slopes for {model.kind}")
