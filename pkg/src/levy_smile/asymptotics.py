"""Small-expiry excess, the implied volatility it predicts, and the regime classifier.

Off the money, the excess over intrinsic behaves like ``tau * I`` where ``I``
is the slope on the out-of-the-money side (call slope above the spot, put
slope below). Feeding that into the small-expiry implied-volatility
functional gives the predicted implied volatility
``|k| / sqrt(-2 tau ln(tau I))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NotApplicableError
from .implied_vol import rr_limit_value
from .models import (SUPPORT_NEGATIVE, SUPPORT_NONE, SUPPORT_POSITIVE, LevyModel, ensure_valid,
                     is_trivial, martingale_drift, support_drift)
from .quadrature import slope_call, slope_put

TRIVIAL_ZERO = "trivial-zero"
BLACK_SCHOLES_FINITE = "black-scholes-finite"
EXPLOSION = "explosion"
DEGENERATE_ZERO = "degenerate-zero"
INCONCLUSIVE = "inconclusive-o-tau"


def _log_moneyness(s0, strike):
    if not (s0 > 0 and strike > 0):
        raise DomainError("spot and strike must be positive")
    if s0 == strike:
        raise DomainError("at-the-money strikes (K = S0) are excluded")
    return math.log(strike / s0)


def relevant_slope(model: LevyModel, s0: float, strike: float) -> tuple[float, float]:
    """``(I, err)``: the call slope for ``K > S0`` and the put slope for ``K < S0``."""
    k = _log_moneyness(s0, strike)
    return slope_call(model, s0, strike) if k > 0 else slope_put(model, s0, strike)


def asymptotic_excess(model: LevyModel, s0: float, strike: float, tau: float) -> float:
    """Leading-order excess ``tau * I``."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    slope, _ = relevant_slope(model, s0, strike)
    return tau * slope


def predicted_iv(model: LevyModel, s0: float, strike: float, tau: float) -> float:
    """``|ln(K/S0)| / sqrt(-2 tau ln(tau I))``; needs ``I > 0`` and ``tau I < 1``."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    slope, _ = relevant_slope(model, s0, strike)
    if slope <= 0.0:
        raise NotApplicableError("zero slope: the excess is o(tau) and no limit is predicted")
    if tau * slope >= 1.0:
        raise DomainError(f"tau * I = {tau * slope:.6g} >= 1: outside the asymptotic regime")
    return rr_limit_value(tau * slope, s0, strike, tau)


@dataclass(frozen=True)
class Regime:
    """Limiting implied-volatility behaviour at a fixed strike."""

    tag: str
    evidence: dict = field(default_factory=dict)

    @property
    def limit(self) -> float:
        """Limiting implied volatility as ``tau -> 0`` (``nan`` when undetermined)."""
        if self.tag in (TRIVIAL_ZERO, DEGENERATE_ZERO):
            return 0.0
        if self.tag == BLACK_SCHOLES_FINITE:
            return self.evidence["sigma"]
        if self.tag == EXPLOSION:
            return math.inf
        return math.nan

    def __str__(self) -> str:
        if self.tag == BLACK_SCHOLES_FINITE:
            return f"{self.tag}({self.evidence['sigma']!r})"
        if self.tag == EXPLOSION:
            return f"{self.tag}({self.evidence['slope']!r})"
        return self.tag


def _zero_in_support(model: LevyModel, side: str) -> bool:
    probe = 1e-12 if side == SUPPORT_POSITIVE else -1e-12
    return bool(np.asarray(model.density(probe)) > 0.0)


def classify(model: LevyModel, s0: float, strike: float, tau_ref: float = 1.0) -> Regime:
    """Decide the regime from model structure; prices are not consulted."""
    ensure_valid(model)
    k = _log_moneyness(s0, strike)
    if not tau_ref > 0:
        raise DomainError("tau_ref must be positive")
    sigma = model.gaussian_sigma
    lam = model.total_intensity
    evidence = {
        "k": k,
        "gamma": martingale_drift(model),
        "sigma": sigma,
        "support": model.support,
        "activity": "finite" if lam is not None else "infinite",
        "variation": "finite" if support_drift(model) is not None else "infinite",
    }
    if is_trivial(model):
        return Regime(TRIVIAL_ZERO, evidence)
    if model.support == SUPPORT_NONE:
        return Regime(BLACK_SCHOLES_FINITE, evidence)

    slope, err = relevant_slope(model, s0, strike)
    evidence["slope"] = slope
    evidence["slope_err"] = err
    if slope > 0.0:
        return Regime(EXPLOSION, evidence)

    drift0 = support_drift(model)
    if drift0 is not None and model.support in (SUPPORT_POSITIVE, SUPPORT_NEGATIVE):
        evidence["support_drift"] = drift0
        evidence["tau_ref"] = tau_ref
        hypotheses = lam is None or _zero_in_support(model, model.support)
        edge = drift0 * tau_ref
        outside = k < edge if model.support == SUPPORT_POSITIVE else k > edge
        if hypotheses and outside:
            return Regime(DEGENERATE_ZERO, evidence)
    return Regime(INCONCLUSIVE, evidence)
