import math
from fractions import Fraction

import numpy as np
import pytest

from frontlab import (Coupling, FrontlabError, PowerSeries, SystemParams,
                      coupling_gradient, double_factorial, eval_coupling,
                      series_vstar)
from frontlab.core_model import binomial_series, model_from_dict, model_to_dict

SQRT2 = math.sqrt(2.0)


def test_double_factorial():
    assert double_factorial(5) == 15
    assert double_factorial(6) == 48
    assert double_factorial(0) == 1
    assert double_factorial(-1) == 1


class TestSystemParams:
    def test_validation(self):
        with pytest.raises(FrontlabError):
            SystemParams(epsilon=-0.1, tau=(1.0,), d=(1.0,))
        with pytest.raises(FrontlabError):
            SystemParams(epsilon=0.1, tau=(1.0, -2.0), d=(1.0, 1.0))
        with pytest.raises(FrontlabError):
            SystemParams(epsilon=0.1, tau=(1.0, 2.0), d=(1.0,))

    def test_distinctness_flags(self):
        p = SystemParams(epsilon=0.1, tau=(1.0, 2.25, 2.89), d=(1.0, 1.5, 1.7))
        assert p.pairwise_distinct_tau
        assert p.pairwise_distinct_ratio
        q = SystemParams(epsilon=0.1, tau=(1.0, 1.0 + 1e-12), d=(1.0, 1.0))
        assert not q.pairwise_distinct_tau
        # distinct tau but coincident ratios tau/d
        r = SystemParams(epsilon=0.1, tau=(1.0, 2.0), d=(1.0, 2.0))
        assert r.pairwise_distinct_tau
        assert not r.pairwise_distinct_ratio


class TestCoupling:
    def test_eval_zero(self):
        c = Coupling(0.0, (0.0, 0.0), (0.0, 0.0))
        assert eval_coupling(c, np.array([0.7, -0.3])) == 0.0

    def test_eval_affine(self):
        c = Coupling(1.0, (2.0, 0.0), (0.0, 0.0))
        assert eval_coupling(c, np.array([3.0, 5.0])) == 7.0

    def test_eval_univariate_cubic(self):
        # direct polynomial evaluation oracle: 2*0.5 - 1*0.5**3
        c = Coupling(0.0, (2.0,), (0.0,), higher=(-1.0,))
        expected = np.polyval([-1.0, 0.0, 2.0, 0.0], 0.5)
        assert eval_coupling(c, np.array([0.5])) == pytest.approx(expected, abs=1e-15)
        assert expected == 0.875

    def test_gradient_affine(self):
        c = Coupling(0.3, (1.0, -2.0, 0.5), (0.0, 0.0, 0.0))
        v = np.array([0.1, 0.4, -0.2])
        assert np.allclose(coupling_gradient(c, v), [1.0, -2.0, 0.5])

    def test_gradient_quadratic(self):
        c = Coupling(0.0, (0.5, 0.0), (1.0, 0.0))
        grad = coupling_gradient(c, np.array([0.3, 0.1]))
        assert grad[0] == pytest.approx(0.5 + 0.6, abs=1e-15)

    def test_gradient_matches_finite_differences(self):
        # central differences, step 1e-6, agreement 1e-8
        rng = np.random.default_rng(0)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            higher = tuple(rng.uniform(-2, 2, rng.integers(0, 3))) if n == 1 else ()
            c = Coupling(rng.uniform(-2, 2), tuple(rng.uniform(-5, 5, n)),
                         tuple(rng.uniform(-5, 5, n)), higher=higher)
            v = rng.uniform(-1, 1, n)
            grad = coupling_gradient(c, v)
            h = 1e-6
            for j in range(n):
                e = np.zeros(n)
                e[j] = h
                fd = (eval_coupling(c, v + e) - eval_coupling(c, v - e)) / (2 * h)
                assert abs(grad[j] - fd) < 1e-8

    def test_higher_requires_single_component(self):
        with pytest.raises(FrontlabError):
            Coupling(0.0, (1.0, 1.0), (0.0, 0.0), higher=(1.0,))


class TestPowerSeries:
    def test_arithmetic_commutes_and_associates(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            order = int(rng.integers(3, 21))
            a = PowerSeries(tuple(rng.uniform(-1, 1, order + 1)))
            b = PowerSeries(tuple(rng.uniform(-1, 1, order + 1)))
            c = PowerSeries(tuple(rng.uniform(-1, 1, order + 1)))
            ab = a * b
            ba = b * a
            assert np.allclose(ab.coeffs, ba.coeffs, rtol=1e-12, atol=1e-12)
            left = (a * b) * c
            right = a * (b * c)
            assert np.allclose(left.coeffs, right.coeffs, rtol=1e-12, atol=1e-12)

    def test_compose_requires_zero_constant(self):
        f = PowerSeries((1.0, 2.0, 3.0))
        g = PowerSeries((0.5, 1.0, 0.0))
        with pytest.raises(FrontlabError):
            f.compose(g)

    def test_compose_known(self):
        # (1+x)^2 composed with 2t equals 1 + 4t + 4t^2
        f = PowerSeries((1.0, 2.0, 1.0))
        g = PowerSeries((0.0, 2.0, 0.0))
        out = f.compose(g)
        assert np.allclose(out.coeffs, [1.0, 4.0, 4.0])

    def test_reciprocal(self):
        f = PowerSeries((2.0, 1.0, -0.5, 0.25))
        r = f.reciprocal()
        prod = f * r
        assert prod.coeffs[0] == pytest.approx(1.0, abs=1e-15)
        assert np.allclose(prod.coeffs[1:], 0.0, atol=1e-15)
        with pytest.raises(FrontlabError):
            PowerSeries((0.0, 1.0)).reciprocal()

    def test_binomial_series_is_exact_binomial(self):
        s = binomial_series(-0.5, 6)
        exact = [((-1) ** k * double_factorial(2 * k - 1) / double_factorial(2 * k))
                 for k in range(7)]
        assert np.allclose(s.coeffs, exact, rtol=1e-15)


class TestSeriesVstar:
    # Binomial-series oracle computed with exact rationals:
    # coefficient of c^(2k+1) is (-1)^k (2k-1)!!/(2k)!! (tau/(2d))^(2k+1).
    def _oracle(self, tau, d, order):
        coeffs = [Fraction(0)] * (order + 1)
        u = Fraction(tau) / (2 * Fraction(d))
        k = 0
        while 2 * k + 1 <= order:
            coeffs[2 * k + 1] = ((-1) ** k
                                 * Fraction(double_factorial(2 * k - 1),
                                            double_factorial(2 * k)) * u ** (2 * k + 1))
            k += 1
        return [float(c) for c in coeffs]

    def test_unit_parameters(self, one_slow):
        s = series_vstar(one_slow, 1, 5)
        assert s.coeffs == (0.0, 0.5, 0.0, -0.0625, 0.0, 0.01171875)
        assert np.allclose(s.coeffs, self._oracle(1, 1, 5))

    def test_zero_constant_and_odd(self):
        p = SystemParams(epsilon=0.1, tau=(1.3, 0.8), d=(0.9, 2.0))
        for j in (1, 2):
            s = series_vstar(p, j, 9)
            assert s.coeffs[0] == 0.0
            assert all(s.coeffs[k] == 0.0 for k in range(0, 10, 2))
            assert np.allclose(s.coeffs, self._oracle(p.tau[j - 1], p.d[j - 1], 9))

    def test_agrees_with_closed_form_at_small_c(self):
        p = SystemParams(epsilon=0.1, tau=(2.0,), d=(1.5,))
        for order in (3, 5, 7, 9):
            s = series_vstar(p, 1, order)
            for c in np.linspace(-0.1 * p.d[0] / p.tau[0], 0.1 * p.d[0] / p.tau[0], 11):
                exact = c * p.tau[0] / math.sqrt(4 * p.d[0] ** 2 + (c * p.tau[0]) ** 2)
                assert abs(s(c) - exact) <= 10 * abs(c) ** (order + 1) + 1e-16

    def test_index_bounds(self, one_slow):
        with pytest.raises(FrontlabError):
            series_vstar(one_slow, 2, 5)


def test_config_round_trip(tmp_path):
    p = SystemParams(epsilon=0.037218913441, tau=(1.0, 2.25), d=(0.31415926535897931, 2.0))
    c = Coupling(0.1234567890123456, (1.0, -2.5), (0.5, 0.0))
    doc = model_to_dict(p, c)
    import json
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    p2, c2 = model_from_dict(json.loads(path.read_text()))
    assert p2 == p
    assert c2 == c


def test_config_rejects_unknown_keys():
    with pytest.raises(FrontlabError):
        model_from_dict({"epsilon": 0.1, "tau": [1.0], "d": [1.0], "bogus": 1})
