"""Small-expiry option asymptotics for exponential-Levy models.

Modules: ``models`` (the six Levy models), ``quadrature`` (slopes against the
Levy density), ``pricing`` (cosine-expansion and Monte-Carlo engines),
``implied_vol`` (Black-Scholes inversion), ``asymptotics`` (predicted
implied volatility and regime classification) and ``cli``.
"""
from .asymptotics import Regime, asymptotic_excess, classify, predicted_iv
from .errors import (ArbitrageError, CapabilityError, ConfigError, DomainError, IntegrationError,
                     LevySmileError, NotApplicableError, NumericalError, UpperBoundError)
from .implied_vol import IVPoint, bs_call, implied_vol, rr_limit_value
from .models import (CGMY, NIG, BlackScholes, CharacteristicQuery, Kou, LevyTriplet, Merton,
                     VarianceGamma, char_exponent, levy_density, martingale_drift, triplet,
                     validate)
from .pricing import PriceQuote, price_call_fourier, price_call_mc, put_from_call
from .quadrature import SlopeResult, integrate_payoff, slope_call, slope_put, slopes

__version__ = "0.1.0"

__all__ = [
    "ArbitrageError", "BlackScholes", "CGMY", "CapabilityError", "CharacteristicQuery",
    "ConfigError", "DomainError", "IVPoint", "IntegrationError", "Kou", "LevySmileError",
    "LevyTriplet", "Merton", "NIG", "NotApplicableError", "NumericalError", "PriceQuote",
    "Regime", "SlopeResult", "UpperBoundError", "VarianceGamma", "asymptotic_excess",
    "bs_call", "char_exponent", "classify", "implied_vol", "integrate_payoff", "levy_density",
    "martingale_drift", "predicted_iv", "price_call_fourier", "price_call_mc", "put_from_call",
    "rr_limit_value", "slope_call", "slope_put", "slopes", "triplet", "validate",
]
