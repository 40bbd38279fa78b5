import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FAMILIES
from orlicz_lorentz import ExtOrliczFunction, OrliczFunction, RejectedInputError, complementary
from orlicz_lorentz.oracles import conjugate_closed_form
from orlicz_lorentz.orliczfn import delta2_probe, n_function_probe, order_leq, young_gap

E = math.e
p2 = OrliczFunction.power(2)
exp_n = OrliczFunction.exp_n()
kink = OrliczFunction.piecewise([1.0], [1.0, 3.0])


class TestEvaluation:
    def test_power(self):
        assert p2(3.0) == 9.0

    def test_exp_n_vanishes_at_zero(self):
        assert exp_n(0.0) == 0.0

    def test_piecewise_integrates_slopes(self):
        assert kink(2.0) == pytest.approx(4.0)

    def test_exp_n_small_argument_is_accurate(self):
        u = 1e-6
        assert exp_n(u) == pytest.approx(u * u / 2 + u**3 / 6, rel=1e-12)

    def test_rejects_bad_descriptors(self):
        with pytest.raises(RejectedInputError):
            OrliczFunction.piecewise([1.0], [0.0, 1.0])
        with pytest.raises(RejectedInputError):
            OrliczFunction.piecewise([1.0], [2.0, 1.0])
        with pytest.raises(RejectedInputError):
            OrliczFunction.power(0.5)

    @pytest.mark.parametrize("phi", [p2, exp_n, kink, OrliczFunction.scaled_power(3, 1.5)])
    def test_descriptor_roundtrip(self, phi):
        assert OrliczFunction.from_descriptor(phi.to_descriptor()) == phi


class TestDerivative:
    def test_power(self):
        assert p2.derivative(1.0) == 2.0

    def test_right_limit_at_kink(self):
        assert kink.derivative(1.0) == 3.0

    def test_exp_n(self):
        assert exp_n.derivative(1.0) == pytest.approx(E - 1, rel=1e-14)

    @pytest.mark.parametrize("name", list(FAMILIES))
    @given(u=st.floats(0.01, 20))
    def test_matches_difference_quotient(self, name, u):
        phi = FAMILIES[name]
        h = 1e-6 * u
        dq = (phi(u + h) - phi(u - h)) / (2 * h)
        assert phi.derivative(u) == pytest.approx(dq, rel=1e-5)


class TestInverse:
    def test_power(self):
        assert p2.inverse(4.0) == pytest.approx(2.0)

    @pytest.mark.parametrize("phi", [p2, exp_n, kink])
    def test_zero(self, phi):
        assert phi.inverse(0.0) == 0.0

    def test_exp_n(self):
        assert exp_n.inverse(E - 2) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("name", list(FAMILIES))
    @given(u=st.floats(1e-3, 30))
    def test_roundtrip(self, name, u):
        phi = FAMILIES[name]
        assert phi.inverse(phi(u)) == pytest.approx(u, rel=1e-10)


class TestComplementary:
    def test_power_two(self):
        star = complementary(p2)
        v = np.array([0.0, 1.0, 2.0, 3.5])
        assert np.allclose(star(v), v**2 / 4)

    def test_identity_has_indicator_conjugate(self):
        star = complementary(OrliczFunction.power(1))
        assert isinstance(star, ExtOrliczFunction)
        assert star(0.5) == 0 and star(1.0) == 0 and star(1.0001) == math.inf

    @pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
    def test_power_matches_legendre_grid(self, p):
        phi = OrliczFunction.power(p)
        numeric = ExtOrliczFunction("legendre", base=phi)
        v = np.logspace(-2, 2, 17)
        assert np.allclose(complementary(phi)(v), numeric(v), rtol=1e-8)
        assert np.allclose(complementary(phi)(v), conjugate_closed_form(phi)(v), rtol=1e-12)

    def test_exp_n_matches_closed_form(self):
        v = np.logspace(-1, 3, 25)
        assert np.allclose(complementary(exp_n)(v), conjugate_closed_form(exp_n)(v), rtol=1e-9)

    def test_piecewise_conjugate_is_piecewise(self):
        star = complementary(kink)
        # slopes 1 and 3 give conjugate slopes equal to the breakpoints
        assert star(1.0) == 0.0
        assert star(2.0) == pytest.approx(1.0)
        assert star(3.0) == pytest.approx(2.0)
        assert star(3.5) == math.inf

    @pytest.mark.parametrize("name", list(FAMILIES))
    def test_biconjugate_returns_original(self, name):
        phi = FAMILIES[name]
        back = complementary(complementary(phi))
        u = np.array([0.1, 0.5, 1.0, 2.0, 5.0])
        assert np.allclose(back(u), phi(u), rtol=1e-6)


class TestYoung:
    def test_equality_on_derivative(self):
        assert young_gap(p2, 1.0, 2.0) == pytest.approx(0.0, abs=1e-15)

    def test_positive_gap(self):
        assert young_gap(p2, 1.0, 1.0) == pytest.approx(0.25)

    @pytest.mark.parametrize("name", list(FAMILIES))
    @given(u=st.floats(0, 10), v=st.floats(0, 10))
    def test_nonnegative(self, name, u, v):
        assert young_gap(FAMILIES[name], u, v) >= -1e-9 * (1 + u * v)


class TestDelta2Probe:
    def test_power_passes(self):
        r = delta2_probe(p2, "global", 5.0, (1e-3, 1e3))
        assert r.passed and r.ratio == pytest.approx(4.0)

    def test_exp_n_fails_near_infinity(self):
        r = delta2_probe(exp_n, "infinity", 10.0, (1.0, 10.0))
        assert not r.passed and 1 <= r.witness <= 4
        assert exp_n(8.0) / exp_n(4.0) == pytest.approx((E**8 - 9) / (E**4 - 5))
        assert exp_n(8.0) / exp_n(4.0) > 10

    def test_exp_plain_fails(self):
        r = delta2_probe(OrliczFunction.exp_plain(), "infinity", 100.0, (1.0, 20.0))
        assert not r.passed and r.ratio > 100

    def test_rejects_small_constant(self):
        with pytest.raises(ValueError):
            delta2_probe(p2, "zero", 2.0)


class TestOrder:
    def test_square_below_cube_at_infinity(self):
        assert order_leq(p2, OrliczFunction.power(3), "infinity", 1.0, 1.0).passed

    def test_cube_not_below_square(self):
        r = order_leq(OrliczFunction.power(3), p2, "infinity", 10.0, 1.0)
        assert not r.passed and r.witness > 10

    @pytest.mark.parametrize("name", list(FAMILIES))
    def test_reflexive(self, name):
        phi = FAMILIES[name]
        assert order_leq(phi, phi, "global", 1.0).passed


class TestNFunctionProbe:
    def test_square_at_zero(self):
        r = n_function_probe(p2, "zero")
        assert np.allclose(r.ratios, 10.0 ** -np.arange(13))
        assert r.trend == "zero"

    def test_identity_at_infinity(self):
        r = n_function_probe(OrliczFunction.power(1), "infinity")
        assert np.allclose(r.ratios, 1.0) and r.trend == "bounded" and r.known is False

    def test_exp_n_at_infinity(self):
        assert n_function_probe(exp_n, "infinity").trend == "diverges"
