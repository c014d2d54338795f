import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DEGENERATE_KOU, JUMP_MODELS, REFERENCE
from levy_smile.errors import DomainError
from levy_smile.models import Kou, Merton
from levy_smile.quadrature import (closed_form_slopes, integrate_payoff, slope_call, slope_put,
                                   slopes)
from oracles.frozen import (KOU_CALL_SLOPE_100_110, KOU_MASS_05_1, KOU_PUT_SLOPE_110_100,
                            KOU_TAIL_MASS_ABOVE_1, MERTON_CALL_SLOPE_100_120)

KOU = REFERENCE["kou"]
MERTON = REFERENCE["merton"]
MONEYNESS = (0.7, 0.9, 0.95, 1.05, 1.3)
MERTON_GRID = [Merton(0.2, lam, mu, d, )
               for lam, mu, d in ((0.5, 0.0, 0.3), (1.0, -0.1, 0.15), (2.0, 0.05, 0.05),
                                  (0.1, -0.3, 0.5), (3.0, 0.2, 0.25))]
KOU_GRID = [Kou(0.1, lam, p, e1, e2)
            for lam, p, e1, e2 in ((1.0, 0.5, 10.0, 5.0), (3.0, 0.3, 25.0, 10.0),
                                   (0.5, 0.7, 3.0, 2.0), (2.0, 0.1, 1.5, 40.0),
                                   (5.0, 0.9, 50.0, 0.5))]


class TestOracles:
    def test_kou_call(self):
        ic, err = slope_call(KOU, 100.0, 110.0)
        assert ic == pytest.approx(KOU_CALL_SLOPE_100_110, rel=1e-9)
        assert err <= max(1e-12, 1e-9 * ic)

    def test_kou_put(self):
        ip, _ = slope_put(KOU, 110.0, 100.0)
        assert ip == pytest.approx(KOU_PUT_SLOPE_110_100, rel=1e-9)

    def test_merton_call(self):
        ic, _ = slope_call(MERTON, 100.0, 120.0)
        assert ic == pytest.approx(MERTON_CALL_SLOPE_100_120, rel=1e-9)

    def test_closed_forms_against_oracles(self):
        assert closed_form_slopes(KOU, 100.0, 110.0)[0] == pytest.approx(KOU_CALL_SLOPE_100_110, rel=1e-9)
        assert closed_form_slopes(KOU, 110.0, 100.0)[1] == pytest.approx(KOU_PUT_SLOPE_110_100, rel=1e-9)
        assert closed_form_slopes(MERTON, 100.0, 120.0)[0] == pytest.approx(MERTON_CALL_SLOPE_100_120,
                                                                           rel=1e-9)

    @pytest.mark.parametrize("model", MERTON_GRID + KOU_GRID, ids=lambda m: repr(m))
    @pytest.mark.parametrize("m", MONEYNESS)
    def test_closed_form_grid(self, model, m):
        ic, ip = closed_form_slopes(model, 100.0, 100.0 * m)
        assert slope_call(model, 100.0, 100.0 * m)[0] == pytest.approx(ic, rel=1e-8)
        assert slope_put(model, 100.0, 100.0 * m)[0] == pytest.approx(ip, rel=1e-8)


class TestIntegratePayoff:
    def test_tail_mass(self):
        value, _ = integrate_payoff(np.ones_like, KOU, (1.0, math.inf))
        assert value == pytest.approx(KOU_TAIL_MASS_ABOVE_1, rel=1e-10)

    def test_indicator_mass(self):
        value, _ = integrate_payoff(np.ones_like, KOU, (0.5, 1.0))
        assert value == pytest.approx(KOU_MASS_05_1, rel=1e-10)

    @pytest.mark.parametrize("k", [0.05, 0.3, 1.2])
    def test_tail_against_closed_form(self, k):
        value, _ = integrate_payoff(np.ones_like, KOU, (k, math.inf))
        assert value == pytest.approx(KOU.lam * KOU.p * math.exp(-KOU.eta1 * k), rel=1e-10)

    def test_vanishing_payoff(self, jump_model):
        assert integrate_payoff(np.zeros_like, jump_model, (0.2, math.inf)) == (0.0, 0.0)

    def test_origin_rejected_for_infinite_activity(self):
        with pytest.raises(DomainError):
            integrate_payoff(np.ones_like, REFERENCE["nig"], (-0.1, 0.1))

    def test_finite_activity_total_mass(self):
        value, _ = integrate_payoff(np.ones_like, MERTON, (-math.inf, math.inf))
        assert value == pytest.approx(MERTON.lam, rel=1e-10)


class TestSlopes:
    def test_black_scholes_zero(self):
        r = slopes(REFERENCE["black_scholes"], 100.0, 90.0)
        assert (r.I_c, r.I_p) == (0.0, 0.0)

    def test_atm_rejected(self, any_model):
        with pytest.raises(DomainError):
            slope_call(any_model, 100.0, 100.0)
        with pytest.raises(DomainError):
            slope_put(any_model, 100.0, 100.0)

    def test_one_sided(self):
        assert slope_put(DEGENERATE_KOU, 110.0, 100.0)[0] == 0.0
        assert slope_call(Kou(0.0, 1.0, 0.0, 10.0, 5.0), 100.0, 110.0)[0] == 0.0

    def test_relevant_side(self):
        assert slopes(KOU, 100.0, 110.0).relevant == slope_call(KOU, 100.0, 110.0)[0]
        assert slopes(KOU, 100.0, 90.0).relevant == slope_put(KOU, 100.0, 90.0)[0]

    def test_infinite_activity_itm_side_is_inf(self):
        r = slopes(REFERENCE["cgmy"], 100.0, 110.0)
        assert r.I_p == math.inf and 0.0 < r.I_c < math.inf

    @pytest.mark.parametrize("name", sorted(JUMP_MODELS))
    def test_positive_density_gives_positive_slopes(self, name):
        m = JUMP_MODELS[name]
        assert slope_call(m, 100.0, 130.0)[0] > 0.0
        assert slope_put(m, 100.0, 70.0)[0] > 0.0

    @pytest.mark.parametrize("name", sorted(JUMP_MODELS))
    def test_monotone_in_strike(self, name):
        m = JUMP_MODELS[name]
        calls = [slope_call(m, 100.0, K)[0] for K in np.linspace(101, 160, 12)]
        puts = [slope_put(m, 100.0, K)[0] for K in np.linspace(50, 99, 12)]
        assert all(a >= b for a, b in zip(calls, calls[1:]))
        assert all(a <= b for a, b in zip(puts, puts[1:]))

    @settings(max_examples=40, deadline=None)
    @given(scale=st.floats(0.01, 100.0), m=st.sampled_from([0.8, 0.95, 1.07, 1.4]),
           name=st.sampled_from(sorted(JUMP_MODELS)))
    def test_homogeneous_degree_one(self, scale, m, name):
        model = JUMP_MODELS[name]
        side = slope_call if m > 1 else slope_put
        base = side(model, 100.0, 100.0 * m)[0]
        scaled = side(model, 100.0 * scale, 100.0 * m * scale)[0]
        assert scaled == pytest.approx(scale * base, rel=1e-8)
