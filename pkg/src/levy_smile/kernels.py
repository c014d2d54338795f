"""Hot numerical loops.

Each kernel exists twice: a scalar loop compiled with ``numba.njit`` and a
vectorised numpy version. The compiled path is used when numba imports and the
environment variable ``LEVY_SMILE_DISABLE_NUMBA`` is unset (or ``0``); the
choice is made once at import. ``BACKEND`` records which one is live.

Both paths are kept bit-for-bit comparable where the arithmetic allows; the
reductions may differ in the last ulp because numpy sums pairwise.
"""
from __future__ import annotations

import math
import os

import numpy as np

DISABLE_ENV = "LEVY_SMILE_DISABLE_NUMBA"

# payoff codes for payoff_moments
PAYOFF_SPOT = 0
PAYOFF_CALL = 1
PAYOFF_PUT = 2
PAYOFF_INDICATOR = 3


def _numba_requested() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("", "0", "false", "no")


try:
    if not _numba_requested():
        raise ImportError("disabled by " + DISABLE_ENV)
    import numba

    njit = numba.njit(cache=True, nogil=True)
    BACKEND = "numba"
except ImportError:
    numba = None
    njit = None
    BACKEND = "numpy"


# ---------------------------------------------------------------------------
# cosine-expansion payoff coefficients


def _cos_payoff_numpy(n, a, b, lo, hi, s0, strike, sign):
    # int_lo^hi sign * (s0 e^x - strike) cos(u_j (x - a)) dx with u_j = j pi / (b - a).
    # Phases at hi are taken relative to j pi, so sin vanishes exactly at hi = b;
    # otherwise its j pi eps roundoff gets multiplied by e^b.
    j = np.arange(n, dtype=float)
    width = b - a
    u = j * (math.pi / width)
    ehi, elo = math.exp(hi), math.exp(lo)
    parity = np.where(j % 2.0 == 0.0, 1.0, -1.0)
    back = j * (math.pi * ((b - hi) / width))
    ch = parity * np.cos(back)
    sh = -parity * np.sin(back)
    fwd = j * (math.pi * ((lo - a) / width))
    cl, sl = np.cos(fwd), np.sin(fwd)
    chi = (ch * ehi - cl * elo + u * (sh * ehi - sl * elo)) / (1.0 + u * u)
    safe = np.where(u == 0.0, 1.0, u)
    psi = np.where(u == 0.0, hi - lo, (sh - sl) / safe)
    return sign * (s0 * chi - strike * psi)


def _cos_payoff_loop(n, a, b, lo, hi, s0, strike, sign):
    out = np.empty(n)
    width = b - a
    ehi = math.exp(hi)
    elo = math.exp(lo)
    step = math.pi / width
    back_step = math.pi * ((b - hi) / width)
    fwd_step = math.pi * ((lo - a) / width)
    for j in range(n):
        w = j * step
        parity = 1.0 if j % 2 == 0 else -1.0
        ch = parity * math.cos(j * back_step)
        sh = -parity * math.sin(j * back_step)
        cl = math.cos(j * fwd_step)
        sl = math.sin(j * fwd_step)
        chi = (ch * ehi - cl * elo + w * (sh * ehi - sl * elo)) / (1.0 + w * w)
        if j == 0:
            psi = hi - lo
        else:
            psi = (sh - sl) / w
        out[j] = sign * (s0 * chi - strike * psi)
    return out


def _filter_numpy(n, order, strength):
    if strength == 0.0:
        return np.ones(n)
    return np.exp(-strength * (np.arange(n) / n) ** order)


def _cos_sum_numpy(density_coeff, payoff_coeff, order, strength):
    # exponential filter exp(-strength (j/n)^order); the half sum is filtered at its own length
    terms = density_coeff * payoff_coeff
    terms[0] *= 0.5
    n = terms.shape[0]
    half = n // 2
    total = float(np.sum(terms * _filter_numpy(n, order, strength)))
    part = float(np.sum(terms[:half] * _filter_numpy(half, order, strength)))
    return total, part, float(np.sum(np.abs(terms)))


def _cos_sum_loop(density_coeff, payoff_coeff, order, strength):
    n = density_coeff.shape[0]
    half = n // 2
    total = 0.0
    part = 0.0
    mag = 0.0
    for j in range(n):
        t = density_coeff[j] * payoff_coeff[j]
        if j == 0:
            t *= 0.5
        mag += abs(t)
        if strength == 0.0:
            total += t
            if j < half:
                part += t
        else:
            total += t * math.exp(-strength * (j / n) ** order)
            if j < half:
                part += t * math.exp(-strength * (j / half) ** order)
    return total, part, mag


# ---------------------------------------------------------------------------
# Monte-Carlo reductions


def _payoff_numpy(x, code, p1, p2):
    if code == PAYOFF_SPOT:
        return p1 * np.exp(x)
    if code == PAYOFF_CALL:
        return np.maximum(p1 * np.exp(x) - p2, 0.0)
    if code == PAYOFF_PUT:
        return np.maximum(p2 - p1 * np.exp(x), 0.0)
    return ((x >= p1) & (x <= p2)).astype(float)


def _payoff_moments_numpy(x, code, p1, p2):
    v = _payoff_numpy(x, code, p1, p2)
    mean = float(np.mean(v))
    d = v - mean
    return mean, float(np.dot(d, d))


def _payoff_scalar(xi, code, p1, p2):
    if code == 0:
        return p1 * math.exp(xi)
    if code == 1:
        return max(p1 * math.exp(xi) - p2, 0.0)
    if code == 2:
        return max(p2 - p1 * math.exp(xi), 0.0)
    return 1.0 if (xi >= p1 and xi <= p2) else 0.0


def _payoff_moments_loop(x, code, p1, p2):
    n = x.shape[0]
    vals = np.empty(n)
    total = 0.0
    for j in range(n):
        v = _payoff_scalar(x[j], code, p1, p2)
        vals[j] = v
        total += v
    mean = total / n
    m2 = 0.0
    for j in range(n):
        d = vals[j] - mean
        m2 += d * d
    return mean, m2


def _segment_sums_numpy(counts, values):
    owner = np.repeat(np.arange(counts.shape[0]), counts)
    return np.bincount(owner, weights=values, minlength=counts.shape[0])


def _segment_sums_loop(counts, values):
    n = counts.shape[0]
    out = np.zeros(n)
    k = 0
    for j in range(n):
        s = 0.0
        for _ in range(counts[j]):
            s += values[k]
            k += 1
        out[j] = s
    return out


def _kou_jumps_numpy(side_uniform, exp_draw, p, eta1, eta2):
    up = side_uniform < p
    return np.where(up, exp_draw / eta1, -exp_draw / eta2)


def _kou_jumps_loop(side_uniform, exp_draw, p, eta1, eta2):
    n = side_uniform.shape[0]
    out = np.empty(n)
    for j in range(n):
        if side_uniform[j] < p:
            out[j] = exp_draw[j] / eta1
        else:
            out[j] = -exp_draw[j] / eta2
    return out


# ---------------------------------------------------------------------------
# Black-Scholes time value: log int_{z1}^{z2} g(z) dz with g = 1 - z R(z)

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(40)
_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
_SQRT2 = math.sqrt(2.0)
_ASYMPTOTIC_FROM = 10.0
_SPLIT = 2.0
# h(t) = g(1/t)/t^2 = sum_n (-1)^n (2n+1)!! t^(2n); 25 terms reach 1e-16 for t <= 0.1
_H_COEFFS = np.cumprod(np.arange(1.0, 50.0, 2.0))
_H_COEFFS[1::2] *= -1.0
_H_DESC = _H_COEFFS[::-1].copy()


def _g_numpy(z):
    from scipy.special import erfcx

    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    big = z > _ASYMPTOTIC_FROM
    zs = z[~big]
    out[~big] = 1.0 - zs * _SQRT_HALF_PI * erfcx(zs / _SQRT2)
    if np.any(big):
        t = 1.0 / z[big]
        out[big] = t * t * np.polyval(_H_DESC, t * t)
    return out


def _h_numpy(t):
    t = np.asarray(t, dtype=float)
    out = np.polyval(_H_DESC, t * t)
    far = t >= 1.0 / _ASYMPTOTIC_FROM
    if np.any(far):
        tb = t[far]
        out[far] = _g_numpy(1.0 / tb) / (tb * tb)
    return out


def _log_g_integral_numpy(z1, z2, width):
    if z1 >= _SPLIT:
        # all in t = 1/z; the t-width s/(z1 z2) may underflow, so stay in logs
        t_hi = 1.0 / z1
        t_lo = 0.0 if math.isinf(z2) else 1.0 / z2
        span = t_hi - t_lo
        t = 0.5 * (t_hi + t_lo) + 0.5 * span * GL_NODES
        mean_h = 0.5 * float(GL_WEIGHTS @ _h_numpy(t))
        if math.isinf(z2):
            return math.log(span * mean_h)
        return math.log(width) - math.log(z1) - math.log(z2) + math.log(mean_h)
    b = min(z2, _SPLIT)
    span = width if b == z2 else b - z1
    total = 0.5 * span * float(GL_WEIGHTS @ _g_numpy(0.5 * (z1 + b) + 0.5 * span * GL_NODES))
    if z2 > b:
        t_lo = 0.0 if math.isinf(z2) else 1.0 / z2
        span = 1.0 / b - t_lo
        t = 0.5 * (1.0 / b + t_lo) + 0.5 * span * GL_NODES
        total += 0.5 * span * float(GL_WEIGHTS @ _h_numpy(t))
    return math.log(total)


def _h_series(t2):
    acc = 0.0
    for c in _H_DESC:
        acc = acc * t2 + c
    return acc


def _g_scalar(z):
    if z > _ASYMPTOTIC_FROM:
        t = 1.0 / z
        return t * t * _h_series(t * t)
    return 1.0 - z * _SQRT_HALF_PI * math.exp(0.5 * z * z) * math.erfc(z / _SQRT2)


def _h_scalar(t):
    if t < 1.0 / _ASYMPTOTIC_FROM:
        return _h_series(t * t)
    return _g_scalar(1.0 / t) * (1.0 / (t * t))


def _log_g_integral_loop(z1, z2, width):
    n = GL_NODES.shape[0]
    if z1 >= _SPLIT:
        t_hi = 1.0 / z1
        t_lo = 0.0 if math.isinf(z2) else 1.0 / z2
        span = t_hi - t_lo
        mid = 0.5 * (t_hi + t_lo)
        acc = 0.0
        for j in range(n):
            acc += GL_WEIGHTS[j] * _h_scalar(mid + 0.5 * span * GL_NODES[j])
        mean_h = 0.5 * acc
        if math.isinf(z2):
            return math.log(span * mean_h)
        return math.log(width) - math.log(z1) - math.log(z2) + math.log(mean_h)
    b = min(z2, _SPLIT)
    span = width if b == z2 else b - z1
    mid = 0.5 * (z1 + b)
    acc = 0.0
    for j in range(n):
        acc += GL_WEIGHTS[j] * _g_scalar(mid + 0.5 * span * GL_NODES[j])
    total = 0.5 * span * acc
    if z2 > b:
        t_lo = 0.0 if math.isinf(z2) else 1.0 / z2
        span = 1.0 / b - t_lo
        mid = 0.5 * (1.0 / b + t_lo)
        acc = 0.0
        for j in range(n):
            acc += GL_WEIGHTS[j] * _h_scalar(mid + 0.5 * span * GL_NODES[j])
        total += 0.5 * span * acc
    return math.log(total)


NUMPY_KERNELS = {
    "cos_payoff_coefficients": _cos_payoff_numpy,
    "cos_series_sum": _cos_sum_numpy,
    "payoff_moments": _payoff_moments_numpy,
    "segment_sums": _segment_sums_numpy,
    "kou_jumps": _kou_jumps_numpy,
    "log_g_integral": _log_g_integral_numpy,
}

if njit is not None:
    _payoff_scalar = njit(_payoff_scalar)
    _h_series = njit(_h_series)
    _g_scalar = njit(_g_scalar)
    _h_scalar = njit(_h_scalar)
    NUMBA_KERNELS = {
        "cos_payoff_coefficients": njit(_cos_payoff_loop),
        "cos_series_sum": njit(_cos_sum_loop),
        "payoff_moments": njit(_payoff_moments_loop),
        "segment_sums": njit(_segment_sums_loop),
        "kou_jumps": njit(_kou_jumps_loop),
        "log_g_integral": njit(_log_g_integral_loop),
    }
    _ACTIVE = NUMBA_KERNELS
else:
    NUMBA_KERNELS = None
    _ACTIVE = NUMPY_KERNELS

cos_payoff_coefficients = _ACTIVE["cos_payoff_coefficients"]
cos_series_sum = _ACTIVE["cos_series_sum"]
payoff_moments = _ACTIVE["payoff_moments"]
segment_sums = _ACTIVE["segment_sums"]
kou_jumps = _ACTIVE["kou_jumps"]
log_g_integral = _ACTIVE["log_g_integral"]
