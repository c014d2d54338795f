"""European option prices under exponential-Levy models (zero rates).

Fourier-cosine engine
---------------------
The law of ``X_tau`` is split into a Gaussian *core* and a *residual*:

    core      = w * Normal(b tau, sigma^2 tau),  w = e^{-lambda tau} (finite activity) or 1
    residual  = law(X_tau) - core

The core is priced in closed form with Black's formula. Only the residual goes
through the cosine expansion; its characteristic function

    e^{i u b tau - sigma^2 tau u^2 / 2} * w * expm1(tau psi_J(u) - ln w)

is of order ``tau`` and carries no atom, so the expansion keeps its relative
accuracy as ``tau -> 0``. The expansion prices the out-of-the-money side
(call for ``K >= S0``, put otherwise); the other side follows by parity.

Monte-Carlo engine
------------------
Paths are split in blocks of ``BLOCK_SIZE``. Block ``j`` draws from
``Generator(Philox(SeedSequence(seed, spawn_key=(j,))))`` so results do not
depend on how blocks are scheduled across workers. Block moments are merged
in block order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapabilityError, DomainError, NumericalError
from .implied_vol import bs_excess, intrinsic
from .models import (CGMY, NIG, SUPPORT_NEGATIVE, SUPPORT_NONE,
                     SUPPORT_POSITIVE, BlackScholes, Kou, LevyModel, Merton,
                     VarianceGamma, core_drift, cumulants, ensure_valid, support_drift)

FOURIER = "fourier-cosine"
MONTE_CARLO = "monte-carlo"

DEFAULT_N_TERMS = 2 ** 14
DEFAULT_RANGE_WIDTH = 12.0
# tail mass beyond TAIL_SPAN / rate is below e^{-TAIL_SPAN} of the jump mass
TAIL_SPAN = 32.0
MAX_HALF_RANGE = 200.0
BLOCK_SIZE = 2 ** 16
# exponential spectral filter exp(-FILTER_STRENGTH (j/N)^FILTER_ORDER) on the series;
# the strength damps the last term to machine epsilon
FILTER_ORDER = 8
FILTER_STRENGTH = -math.log(np.finfo(float).eps)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PriceQuote:
    """A priced option.

    ``excess`` is the value over intrinsic, computed directly on the
    out-of-the-money side so it keeps full relative precision even when it is
    far below one ulp of ``value``; ``log_excess`` is its logarithm (``-inf``
    for zero) and may be finite where ``excess`` underflows.
    """

    value: float
    method: str
    err: float
    n: int
    excess: float = math.nan
    log_excess: float = math.nan


def _check_market(s0, strike, tau):
    for name, v in (("S0", s0), ("K", strike)):
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive and finite")
    if not (tau >= 0 and math.isfinite(tau)):
        raise DomainError("tau must be nonnegative and finite")


# ---------------------------------------------------------------------------
# Fourier-cosine


def truncation_range(model: LevyModel, tau: float, strike_log: float,
                     range_width: float = DEFAULT_RANGE_WIDTH) -> tuple[float, float]:
    """Interval carrying the residual law, always containing the log-strike."""
    c1, c2, c4 = cumulants(model)
    half = range_width * math.sqrt(c2 * tau + math.sqrt(c4 * tau))
    lo, hi = c1 * tau - half, c1 * tau + half
    x0 = core_drift(model) * tau
    down, up = model.tail_rates()
    if math.isfinite(down):
        lo = min(lo, x0 - TAIL_SPAN / down)
    if math.isfinite(up):
        # the call payoff grows like e^x, so the relevant decay rate is up - 1
        hi = max(hi, x0 + TAIL_SPAN / max(up - 1.0, 1e-12))
    rng = model.jump_range()
    if rng is not None:
        lo = min(lo, x0 + rng[0])
        hi = max(hi, x0 + rng[1])
    lo = max(lo, x0 - MAX_HALF_RANGE)
    hi = min(hi, x0 + MAX_HALF_RANGE)
    lo = min(lo, strike_log - 1e-3)
    hi = max(hi, strike_log + 1e-3)
    # one-sided finite-variation jumps: X_tau never crosses x0, so the range
    # ends exactly there and the even extension adds no jump at the edge
    if support_drift(model) is not None:
        if model.support == SUPPORT_POSITIVE:
            lo = x0
        elif model.support == SUPPORT_NEGATIVE:
            hi = x0
    return lo, hi


def _core_value(s0, strike, tau, sigma, x0, weight, side):
    """``weight * E[payoff(S0 exp(x0 + sigma sqrt(tau) Z))]``."""
    if weight == 0.0:
        return 0.0
    fwd = s0 * math.exp(x0 + 0.5 * sigma * sigma * tau)
    if side == "call":
        base = intrinsic(fwd, strike)
    else:
        base = intrinsic(strike, fwd)
    if sigma > 0:
        base += bs_excess(fwd, strike, tau, sigma)
    return weight * base


def _log_core_otm(s0, strike, tau, sigma, x0):
    """Log of the core value when it alone makes up the price (pure Gaussian model)."""
    from .implied_vol import log_bs_excess

    fwd = s0 * math.exp(x0 + 0.5 * sigma * sigma * tau)
    if sigma == 0.0:
        v = intrinsic(fwd, strike) if strike >= s0 else intrinsic(strike, fwd)
        return math.log(v) if v > 0 else -math.inf
    if (fwd <= strike) == (strike >= s0):
        return log_bs_excess(fwd, strike, tau, sigma)
    return math.log(_core_value(s0, strike, tau, sigma, x0, 1.0,
                                "call" if strike >= s0 else "put"))


def cos_price(model: LevyModel, s0: float, strike: float, tau: float, side: str, *,
              n_terms: int = DEFAULT_N_TERMS, range_width: float = DEFAULT_RANGE_WIDTH,
              filter_strength: float = FILTER_STRENGTH) -> tuple[float, float, int]:
    """``E[payoff]`` for ``side`` in {"call", "put"}; returns ``(value, err, n_terms)``.

    The residual law has a singular point at ``x0`` (an atom removed, or the
    ``|x|^(-1-Y)`` peak of an infinite-activity density), so its cosine
    coefficients decay slowly. The payoff vanishes near ``x0`` off the money,
    which is where an exponential filter restores fast convergence;
    ``filter_strength=0`` gives the plain truncated series.
    """
    if side not in ("call", "put"):
        raise DomainError(f"side must be 'call' or 'put', got {side!r}")
    if n_terms < 2:
        raise DomainError("n_terms must be at least 2")
    sigma = model.gaussian_sigma
    b = core_drift(model)
    x0 = b * tau
    lam = model.total_intensity
    jumps = model.support != SUPPORT_NONE
    weight = math.exp(-lam * tau) if (jumps and lam is not None) else 1.0

    core = _core_value(s0, strike, tau, sigma, x0, weight, side)
    if not jumps:
        return core, float(4.0 * _EPS * abs(core)), n_terms

    k = math.log(strike / s0)
    a, bb = truncation_range(model, tau, k, range_width)
    u = np.arange(n_terms) * (math.pi / (bb - a))
    log_w = -lam * tau if lam is not None else 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        resid = (np.exp(1j * u * x0 - 0.5 * sigma * sigma * tau * u * u)
                 * (weight * np.expm1(tau * model.jump_exponent(u) - log_w)))
        dens = (2.0 / (bb - a)) * np.real(resid * np.exp(-1j * u * a))
    if not np.all(np.isfinite(dens)):
        raise NumericalError("non-finite characteristic function values in the cosine expansion")

    if side == "call":
        lo, hi, sign = max(k, a), bb, 1.0
    else:
        lo, hi, sign = a, min(k, bb), -1.0
    if hi <= lo:
        return core, float(4.0 * _EPS * abs(core)), n_terms
    pay = kernels.cos_payoff_coefficients(n_terms, a, bb, lo, hi, float(s0), float(strike),
                                           sign)
    total, half, mag = kernels.cos_series_sum(dens, pay, FILTER_ORDER,
                                               float(filter_strength))
    value = core + total
    # truncation from the half-length sum, rounding as sqrt(N) eps per unit of |terms|
    err = float(2.0 * abs(total - half) + 4.0 * math.sqrt(n_terms) * _EPS * (abs(core) + mag))
    if not math.isfinite(value):
        raise NumericalError("cosine expansion produced a non-finite price")
    return value, err, n_terms


def price_otm_fourier(model: LevyModel, s0: float, strike: float, tau: float, *,
                      n_terms: int = DEFAULT_N_TERMS,
                      range_width: float = DEFAULT_RANGE_WIDTH) -> tuple[float, float]:
    """Out-of-the-money option value (the call excess) and its error estimate."""
    side = "call" if strike >= s0 else "put"
    value, err, _ = cos_price(model, s0, strike, tau, side, n_terms=n_terms,
                              range_width=range_width)
    return value, err


def price_call_fourier(model: LevyModel, s0: float, strike: float, tau: float,
                       n_terms: int = DEFAULT_N_TERMS,
                       range_width: float = DEFAULT_RANGE_WIDTH) -> PriceQuote:
    """European call by the core-plus-cosine expansion; ``tau = 0`` gives intrinsic."""
    ensure_valid(model)
    _check_market(s0, strike, tau)
    floor = intrinsic(s0, strike)
    if tau == 0:
        return PriceQuote(floor, FOURIER, 0.0, 0, 0.0, -math.inf)
    excess, err = price_otm_fourier(model, s0, strike, tau, n_terms=n_terms,
                                    range_width=range_width)
    if -err <= excess < 0.0:
        # a negative residue below the error estimate is roundoff around zero
        excess = 0.0
    if model.support == SUPPORT_NONE:
        log_excess = _log_core_otm(s0, strike, tau, model.gaussian_sigma,
                                   core_drift(model) * tau)
    else:
        log_excess = math.log(excess) if excess > 0 else (-math.inf if excess == 0 else math.nan)
    return PriceQuote(floor + excess, FOURIER, err, n_terms, excess, log_excess)


def price_put_fourier(model: LevyModel, s0: float, strike: float, tau: float,
                      n_terms: int = DEFAULT_N_TERMS,
                      range_width: float = DEFAULT_RANGE_WIDTH) -> PriceQuote:
    """European put priced directly from the put payoff (no parity)."""
    ensure_valid(model)
    _check_market(s0, strike, tau)
    if tau == 0:
        return PriceQuote(intrinsic(strike, s0), FOURIER, 0.0, 0, 0.0, -math.inf)
    value, err, n = cos_price(model, s0, strike, tau, "put", n_terms=n_terms,
                              range_width=range_width)
    excess = value - intrinsic(strike, s0)
    return PriceQuote(value, FOURIER, err, n, excess,
                      math.log(excess) if excess > 0 else -math.inf)


def put_from_call(call: float, s0: float, strike: float) -> float:
    """Put-call parity at zero rates."""
    return call - s0 + strike


# ---------------------------------------------------------------------------
# Monte-Carlo


def _sample_bs(model: BlackScholes, tau, n, rng):
    z = rng.standard_normal(n)
    s = model.sigma
    return -0.5 * s * s * tau + s * math.sqrt(tau) * z


def _sample_merton(model: Merton, tau, n, rng):
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    counts = rng.poisson(model.lam * tau, n)
    x = core_drift(model) * tau + model.sigma * math.sqrt(tau) * z1
    return x + counts * model.mu_j + np.sqrt(counts) * model.delta_j * z2


def _sample_kou(model: Kou, tau, n, rng):
    z = rng.standard_normal(n)
    counts = rng.poisson(model.lam * tau, n)
    total = int(counts.sum())
    side = rng.random(total)
    size = rng.standard_exponential(total)
    jumps = kernels.kou_jumps(side, size, model.p, model.eta1, model.eta2)
    x = core_drift(model) * tau + model.sigma * math.sqrt(tau) * z
    return x + kernels.segment_sums(counts, jumps)


def _sample_vg(model: VarianceGamma, tau, n, rng):
    clock = rng.gamma(tau / model.kappa, model.kappa, n)
    z = rng.standard_normal(n)
    return core_drift(model) * tau + model.theta_vg * clock + model.sigma_vg * np.sqrt(clock) * z


def _sample_nig(model: NIG, tau, n, rng):
    gbar = math.sqrt(model.alpha ** 2 - model.beta ** 2)
    dt = model.delta * tau
    clock = rng.wald(dt / gbar, dt * dt, n)
    z = rng.standard_normal(n)
    # the jump exponent is compensated, so the subordinated part is centred
    drift = core_drift(model) - model.delta * model.beta / gbar
    return drift * tau + model.beta * clock + np.sqrt(clock) * z


SAMPLERS = {
    BlackScholes: _sample_bs,
    Merton: _sample_merton,
    Kou: _sample_kou,
    VarianceGamma: _sample_vg,
    NIG: _sample_nig,
}


def sample_increments(model: LevyModel, tau: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` exact draws of ``X_tau`` under the martingale measure."""
    sampler = SAMPLERS.get(type(model))
    if sampler is None:
        raise CapabilityError(f"Monte-Carlo sampling is not available for {model.kind}")
    return sampler(model, tau, n, rng)


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Philox stream for path block ``block``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def mc_expectation(model: LevyModel, tau: float, code: int, p1: float, p2: float,
                   n_paths: int, seed: int, *, workers: int | None = None) -> tuple[float, float]:
    """Sample mean and standard error of a payoff of ``X_tau``.

    ``code`` selects the payoff (see ``kernels.PAYOFF_*``): ``p1 e^x``,
    ``(p1 e^x - p2)^+``, ``(p2 - p1 e^x)^+`` or ``1{p1 <= x <= p2}``.
    """
    ensure_valid(model)
    if type(model) not in SAMPLERS:
        raise CapabilityError(f"Monte-Carlo sampling is not available for {model.kind}")
    if n_paths < 2:
        raise DomainError("n_paths must be at least 2")
    if not tau > 0:
        raise DomainError("tau must be positive for Monte-Carlo")
    sizes = [BLOCK_SIZE] * (n_paths // BLOCK_SIZE)
    if n_paths % BLOCK_SIZE:
        sizes.append(n_paths % BLOCK_SIZE)

    def run(block):
        x = sample_increments(model, tau, sizes[block], block_generator(seed, block))
        return kernels.payoff_moments(x, code, float(p1), float(p2))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            moments = list(pool.map(run, range(len(sizes))))
    else:
        moments = [run(j) for j in range(len(sizes))]

    count, mean, m2 = 0, 0.0, 0.0
    for size, (bm, bm2) in zip(sizes, moments):
        total = count + size
        delta = bm - mean
        mean += delta * size / total
        m2 += bm2 + delta * delta * count * size / total
        count = total
    stderr = math.sqrt(m2 / (count - 1) / count)
    return mean, stderr


def price_call_mc(model: LevyModel, s0: float, strike: float, tau: float, n_paths: int,
                  seed: int, *, workers: int | None = None) -> PriceQuote:
    """Seeded Monte-Carlo call price; ``err`` is the standard error."""
    _check_market(s0, strike, tau)
    if tau == 0:
        return PriceQuote(intrinsic(s0, strike), MONTE_CARLO, 0.0, n_paths, 0.0, -math.inf)
    mean, stderr = mc_expectation(model, tau, kernels.PAYOFF_CALL, s0, strike, n_paths, seed,
                                  workers=workers)
    excess = mean - intrinsic(s0, strike)
    return PriceQuote(mean, MONTE_CARLO, stderr, n_paths, excess,
                      math.log(excess) if excess > 0 else -math.inf)


def mc_supported(model: LevyModel) -> bool:
    return type(model) in SAMPLERS and not isinstance(model, CGMY)
