import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FAMILIES, step_functions, weights
from orlicz_lorentz import ExtOrliczFunction, OrliczFunction, StepFunction, Weight, \
    characteristic, complementary, rearrange
from orlicz_lorentz.errors import ModeError, SizeError
from orlicz_lorentz.modular import (
    dual_map,
    fundamental,
    fundamental_closed_form,
    luxemburg_norm,
    orlicz_norm,
    p_modular,
    q_modular,
    q_modular_inverse_weight,
    rho,
    theta_bar,
)

p2 = OrliczFunction.power(2)
ident = OrliczFunction.power(1)
w1 = Weight.constant(1.0, 1.0)
chi = characteristic(0, 1, 1)
zero = StepFunction([0, 1], [0.0])


class TestRho:
    def test_characteristic(self):
        assert rho(p2, w1, chi) == 1.0

    def test_zero(self):
        assert rho(p2, w1, zero) == 0.0

    def test_rearranges_before_weighting(self):
        w = Weight([0, 1, 2], [2.0, 1.0])
        assert rho(p2, w, StepFunction.from_sequence([1, 2])) == 9.0


class TestQ:
    def test_characteristic(self):
        assert q_modular(p2, w1, chi) == 1.0

    def test_zero(self):
        assert q_modular(p2, w1, zero) == 0.0

    def test_no_merging_when_ratio_decreases(self):
        w = Weight([0, 0.5, 1], [2.0, 1.0])
        f = StepFunction(w.breaks, [6.0, 1.0])
        expected = (3.0**2 * 2.0 + 1.0 * 1.0) * 0.5
        assert q_modular(p2, w, f) == pytest.approx(expected, rel=1e-15)

    @given(step_functions(), weights(), st.sampled_from(list(FAMILIES)))
    def test_inverse_weight_form_agrees(self, f, w, name):
        phi = FAMILIES[name]
        a = q_modular(phi, w, f)
        b = q_modular_inverse_weight(phi, w, f)
        assert a == pytest.approx(b, rel=1e-10, abs=1e-300)

    @given(step_functions(), weights(), st.floats(0.01, 10))
    def test_scaling_is_monotone(self, f, w, c):
        assert q_modular(p2, w, f * c) == pytest.approx(c * c * q_modular(p2, w, f), rel=1e-12)


class TestP:
    @pytest.mark.parametrize("mode", ["convex_opt", "grid_oracle", "via_q"])
    def test_characteristic(self, mode):
        assert p_modular(p2, w1, chi, mode=mode) == pytest.approx(1.0, abs=1e-9)

    def test_identity_gives_l1(self):
        f = StepFunction([0, 0.2, 0.7, 1], [0.5, 2.0, 1.0])
        w = Weight([0, 0.3, 1], [2.0, 0.5])
        assert p_modular(ident, w, f, mode="grid_oracle") == pytest.approx(f.integral(), rel=1e-9)

    @pytest.mark.parametrize("name", list(FAMILIES))
    @given(data=st.data())
    def test_below_q(self, name, data):
        f = data.draw(step_functions(max_cells=5))
        w = data.draw(weights(max_cells=4))
        phi = FAMILIES[name]
        P = p_modular(phi, w, f)
        Q = q_modular(phi, w, f)
        assert P <= Q * (1 + 1e-9) + 1e-12
        assert abs(P - Q) <= 1e-6 * (1 + Q)

    def test_via_q_needs_n_function(self):
        with pytest.raises(ModeError):
            p_modular(ident, w1, chi, mode="via_q")

    def test_size_caps(self):
        f = StepFunction(np.linspace(0, 1, 10), np.arange(9, 0, -1.0))
        with pytest.raises(SizeError):
            p_modular(p2, w1, f, mode="grid_oracle")

    def test_unknown_mode(self):
        with pytest.raises(ModeError):
            p_modular(p2, w1, chi, mode="simplex")


class TestLuxemburg:
    @pytest.mark.parametrize("space", ["lambda", "m"])
    def test_characteristic(self, space):
        assert luxemburg_norm(p2, w1, chi, space).value == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("space", ["lambda", "m"])
    @given(f=step_functions(), w=weights(), c=st.floats(0.01, 100))
    def test_homogeneous(self, space, f, w, c):
        a = luxemburg_norm(p2, w, f * c, space).value
        b = luxemburg_norm(p2, w, f, space).value
        assert a == pytest.approx(c * b, rel=1e-12, abs=1e-300)

    @given(step_functions(), weights())
    def test_certificate_sits_on_unit_modular(self, f, w):
        cert = luxemburg_norm(FAMILIES["exp_n"], w, f, "m")
        if cert.value > 0:
            assert cert.modular_at_witness <= 1.0
            assert q_modular(FAMILIES["exp_n"], w, f * (1 / (cert.value * (1 - 1e-9)))) > 1.0

    def test_identity_is_l1(self):
        f = StepFunction([0, 0.25, 0.5, 1], [3.0, 0.0, 1.5])
        w = Weight([0, 0.5, 1], [3.0, 1.0])
        assert luxemburg_norm(ident, w, f, "m").value == pytest.approx(f.integral(), rel=1e-14)


class TestOrlicz:
    @pytest.mark.parametrize("space", ["lambda", "m"])
    def test_characteristic(self, space):
        cert, K = orlicz_norm(p2, w1, chi, space)
        assert cert.value == pytest.approx(2.0, abs=1e-10)
        assert K.k_star == pytest.approx(1.0, abs=1e-10)
        assert K.k_star_star == pytest.approx(1.0, abs=1e-10)
        assert dual_map(p2, w1, chi, space, 1.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("space", ["lambda", "m"])
    @pytest.mark.parametrize("name", list(FAMILIES))
    @given(data=st.data())
    def test_sandwich(self, space, name, data):
        f = data.draw(step_functions())
        w = data.draw(weights())
        phi = FAMILIES[name]
        lux = luxemburg_norm(phi, w, f, space).value
        orl = orlicz_norm(phi, w, f, space)[0].value
        assert lux <= orl * (1 + 1e-8) + 1e-300
        assert orl <= 2 * lux * (1 + 1e-8) + 1e-300

    def test_zero(self):
        cert, K = orlicz_norm(p2, w1, zero, "m")
        assert cert.value == 0 and K is None

    def test_identity_uses_limit_certificate(self):
        f = StepFunction([0, 0.5, 1], [2.0, 1.0])
        cert, K = orlicz_norm(ident, w1, f, "lambda")
        assert cert.kind == "orlicz-limit" and K is None
        gap = cert.value - f.integral()
        assert 0 <= gap <= 1.0 / cert.details["largest_k"] * (1 + 1e-9)


class TestThetaBar:
    bounded = ExtOrliczFunction("piecewise", (), (0.0,), 1.0)

    def test_finite_function(self):
        assert theta_bar(p2, w1, chi) == 0.0

    def test_equals_top_level_ratio(self):
        assert theta_bar(self.bounded, w1, chi) == pytest.approx(1.0, rel=1e-12)
        assert theta_bar(self.bounded, w1, chi * 0.25) == pytest.approx(0.25, rel=1e-12)

    def test_threshold(self):
        f = StepFunction([0, 0.5, 1], [2.0, 0.5])
        assert theta_bar(self.bounded, w1, f) == pytest.approx(2.0, rel=1e-12)

    def test_conjugate_of_identity_has_this_shape(self):
        star = complementary(ident)
        assert star.domain_end == 1.0


class TestFundamental:
    def test_m_space(self):
        assert fundamental("m", "lux", p2, w1, 0.25) == pytest.approx(0.5, rel=1e-12)

    def test_lambda_space(self):
        assert fundamental("lambda", "lux", p2, w1, 0.25) == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize("phi, w", [
        (p2, w1),
        (OrliczFunction.exp_n(), Weight.constant(1.0, 1.0)),
        (OrliczFunction.power(3), Weight([0, 0.25, 1], [4.0, 1.0])),
    ])
    def test_ladder_matches_closed_form_and_decreases(self, phi, w):
        vals = []
        for k in range(21):
            t = 2.0**-k
            v = fundamental("m", "lux", phi, w, t)
            assert v == pytest.approx(fundamental_closed_form("m", phi, w, t), rel=1e-8)
            vals.append(v)
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_orlicz_fundamental(self):
        assert fundamental("m", "orlicz", p2, w1, 1.0) == pytest.approx(2.0)
