"""Regenerate the frozen oracle values used by the test-suite.

Every number here is computed without the package: brute-force midpoint
sums, scipy quadrature or mpmath at 50 digits. Run it and paste the output
into ``frozen.py`` only when an oracle definition changes.

    python tests/oracles/make_oracles.py
"""
import math

import mpmath as mp
import numpy as np
from scipy import integrate, stats

mp.mp.dps = 50


def riemann(f, a, b, n=10_000_000):
    h = (b - a) / n
    x = a + h * (np.arange(n) + 0.5)
    return float(np.sum(f(x)) * h)


def kou_density(x, lam, p, e1, e2):
    return lam * np.where(x > 0, p * e1 * np.exp(-e1 * np.abs(x)), (1 - p) * e2 * np.exp(-e2 * np.abs(x)))


def main():
    out = {}
    # Kou call slope, S0=100, K=110
    k = math.log(1.1)
    out["KOU_CALL_SLOPE_100_110"] = riemann(
        lambda x: (100 * np.exp(x) - 110) * kou_density(x, 1, 0.5, 10, 5), k, k + 20)
    # Kou put slope, S0=110, K=100
    k = math.log(100 / 110)
    out["KOU_PUT_SLOPE_110_100"] = riemann(
        lambda x: (100 - 110 * np.exp(x)) * kou_density(x, 1, 0.5, 10, 5), k - 20, k)
    # Merton call slope, lam=0.5, mu=0, delta=0.3, S0=100, K=120
    k = math.log(1.2)
    out["MERTON_CALL_SLOPE_100_120"] = riemann(
        lambda x: (100 * np.exp(x) - 120) * 0.5 * stats.norm.pdf(x, 0.0, 0.3), k, k + 20)
    # Merton martingale drift, sigma=0, lam=1, mu=0, delta=0.1
    jump = integrate.quad(lambda y: (math.exp(y) - 1 - y * (abs(y) <= 1)) * stats.norm.pdf(y, 0, 0.1),
                          -3, 3, points=[-1, 0, 1], epsabs=1e-15, epsrel=1e-14)[0]
    out["MERTON_DRIFT_LAM1_DELTA01"] = -jump
    # Black-Scholes S0=K=100, tau=1, theta=0.2 by integrating the lognormal payoff
    s = 0.2

    def payoff(z):
        return max(100 * mp.e ** (-s * s / 2 + s * z) - 100, 0) * mp.npdf(z)

    out["BS_ATM_1Y_20"] = float(mp.quad(payoff, [-mp.inf, s / 2, mp.inf]))
    # Kou upper tail mass above 1 (lam p e^{-eta1})
    out["KOU_TAIL_MASS_ABOVE_1"] = float(integrate.quad(lambda x: 0.5 * 10 * math.exp(-10 * x), 1, 60,
                                                        epsabs=1e-18, epsrel=1e-14)[0])
    # Kou indicator [0.5, 1] mass
    out["KOU_MASS_05_1"] = float(integrate.quad(lambda x: 0.5 * 10 * math.exp(-10 * x), 0.5, 1.0,
                                                epsabs=1e-18, epsrel=1e-14)[0])
    for name, v in out.items():
        print(f"{name} = {v!r}")


if __name__ == "__main__":
    main()
