"""erf / erfinv against series and mpmath oracles."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakthresh.special import erf, erfc, erfcinv, erfinv, gaussian_weight

import oracles

# [DERIVED] Maclaurin series of erf summed to 1e-40 term magnitude
ERF_ONE = float(oracles.erf_taylor(1))


class TestErf:
    def test_zero(self):
        assert erf(0.0) == 0.0

    def test_value_at_one(self):
        assert ERF_ONE == 0.8427007929497149
        assert abs(erf(1.0) - ERF_ONE) <= 2e-16

    @pytest.mark.parametrize("x", [1e-8, 0.1, 0.5, 1.7, 3.0, 6.0])
    def test_matches_series(self, x):
        np.testing.assert_allclose(erf(x), float(oracles.erf_taylor(x)), rtol=2e-16, atol=0)

    def test_odd_exactly(self):
        x = np.linspace(-6, 6, 1201)
        assert all(erf(-v) == -erf(v) for v in x)

    def test_monotone(self):
        x = np.linspace(-5, 5, 2001)
        vals = np.array([erf(v) for v in x])
        assert np.all(np.diff(vals) >= 0)

    def test_erfc_complements(self):
        for x in (-2.0, -0.3, 0.0, 0.4, 2.5):
            np.testing.assert_allclose(erf(x) + erfc(x), 1.0, atol=1e-16)


class TestErfinv:
    def test_zero(self):
        assert erfinv(0.0) == 0.0

    def test_inverse_of_oracle_value(self):
        assert abs(erfinv(ERF_ONE) - 1.0) <= 1e-12

    def test_roundtrip_log_grid(self):
        tail = np.logspace(-10, 0, 2000, endpoint=False)
        p = np.concatenate([-(1 - tail), np.linspace(-0.999, 0.999, 999), 1 - tail])
        err = max(abs(erf(erfinv(float(v))) - float(v)) for v in p)
        assert err <= 1e-12

    @pytest.mark.parametrize("p", [1e-300, 1e-20, 0.1, 0.5, 0.9, 1 - 1e-6, 1 - 1e-12, 1 - 2**-52])
    def test_against_mpmath(self, p):
        np.testing.assert_allclose(erfinv(p), float(mp.erfinv(mp.mpf(p))), rtol=4e-16)

    def test_odd_exactly(self):
        p = np.linspace(-0.999999, 0.999999, 777)
        assert all(erfinv(-v) == -erfinv(v) for v in p)

    def test_strictly_increasing(self):
        tail = np.logspace(-15, -0.31, 400)
        p = np.concatenate([-(1 - tail), np.linspace(-0.49, 0.49, 99), (1 - tail)[::-1]])
        vals = np.array([erfinv(float(v)) for v in p])
        assert np.all(np.diff(vals) > 0)

    @pytest.mark.parametrize("p", [1.0, -1.0, 1.5, -3.0, math.nan, math.inf])
    def test_domain_errors(self, p):
        with pytest.raises(ValueError):
            erfinv(p)

    @given(st.floats(min_value=-0.999999999, max_value=0.999999999))
    @settings(max_examples=300, deadline=None)
    def test_roundtrip_property(self, p):
        assert abs(erf(erfinv(p)) - p) <= 1e-12


class TestErfcinv:
    @pytest.mark.parametrize("q", [1e-307, 1e-200, 1e-50, 1e-12, 0.3, 1.0, 1.7, 2 - 1e-10])
    def test_against_mpmath(self, q):
        np.testing.assert_allclose(erfcinv(q), float(oracles.erfcinv(q)), rtol=4e-16, atol=1e-300)

    def test_tail_roundtrip_relative(self):
        for q in np.logspace(-300, -1, 200):
            x = erfcinv(float(q))
            # erfc amplifies a relative error in x by about 2 x^2
            cond = max(1.0, 2 * x * x)
            np.testing.assert_allclose(float(mp.erfc(x)), q, rtol=4 * cond * 2.3e-16)

    @pytest.mark.parametrize("q", [0.0, 2.0, -1.0, 3.0])
    def test_domain(self, q):
        with pytest.raises(ValueError):
            erfcinv(q)


class TestGaussianWeight:
    def test_underflow_is_zero(self):
        assert gaussian_weight(40.0) == 0.0
        assert gaussian_weight(math.inf) == 0.0

    def test_value(self):
        np.testing.assert_allclose(gaussian_weight(1.5), math.exp(-2.25), rtol=1e-16)
