from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from conftest import step_functions, weights
from orlicz_lorentz import StepFunction, Weight, characteristic, rearrange
from orlicz_lorentz.errors import DomainError
from orlicz_lorentz.level import (
    crosscheck_level,
    halperin_level,
    inverse_level_weight,
    sinnamon_level,
)
from orlicz_lorentz.oracles import level_ratios_exact, maximal_level_intervals
from orlicz_lorentz.stepfn import merge_grids, submajorizes

w1 = Weight.constant(1.0, 1.0)
w21 = Weight([0, 0.5, 1], [2.0, 1.0])


class TestHalperin:
    def test_increasing_pair_merges(self):
        dec = halperin_level(StepFunction([0, 0.5, 1], [0.0, 2.0]), w1)
        assert [(iv.a, iv.b) for iv in dec.intervals] == [(0.0, 1.0)]
        assert dec.level == StepFunction([0, 1], [1.0])

    def test_decreasing_multiple_of_weight_is_fixed(self):
        w = Weight([0, 0.3, 0.7, 1], [3.0, 2.0, 1.0])
        f = StepFunction(w.breaks, w.values * np.array([2.0, 1.5, 1.0]))
        dec = halperin_level(f, w)
        assert dec.intervals == () and dec.level == f

    def test_characteristic_over_two_cell_weight(self):
        dec = halperin_level(characteristic(0, 1, 1), w21)
        assert dec.level.values == pytest.approx([4 / 3, 2 / 3], abs=1e-15)
        assert dec.ratio_profile == pytest.approx([2 / 3, 2 / 3], abs=1e-15)

    def test_longer_function_rejected(self):
        with pytest.raises(DomainError):
            halperin_level(StepFunction([0, 2], [1.0]), w1)

    @given(step_functions(), weights())
    def test_mass_preserved(self, f, w):
        dec = halperin_level(f, w)
        assert dec.level.integral() == pytest.approx(f.integral(), rel=1e-12, abs=1e-14)

    @given(step_functions(), weights())
    def test_ratio_nonincreasing_for_rearranged_input(self, f, w):
        r = halperin_level(rearrange(f), w).ratio_profile
        assert np.all(np.diff(r) <= 1e-12 * (1 + np.abs(r[:-1])))

    @given(step_functions(), weights())
    def test_level_interval_test(self, f, w):
        dec = halperin_level(f, w)
        for iv in dec.intervals:
            grid = dec.grid[(dec.grid > iv.a) & (dec.grid <= iv.b)]
            for t in grid:
                F = f.pad(w.domain).primitive(t) - f.pad(w.domain).primitive(iv.a)
                W = w.W(t) - w.W(iv.a)
                assert F / W <= iv.ratio * (1 + 1e-12) + 1e-14

    @given(step_functions(max_cells=12), weights(max_cells=6))
    def test_matches_exact_minmax_oracle(self, f, w):
        g, ratios = level_ratios_exact(f, w)
        dec = halperin_level(f, w)
        grid = np.array([float(x) for x in g])
        mine = dec.ratio_profile if np.array_equal(grid, dec.grid) else (
            dec.level / w).on_grid(grid)
        assert np.allclose(mine, [float(r) for r in ratios], rtol=1e-12, atol=1e-14)


class TestSinnamon:
    def test_decreasing_input_unchanged(self):
        f = StepFunction([0, 0.4, 1], [2.0, 1.0])
        s = sinnamon_level(f, w1)
        assert np.array_equal(s.breaks, f.breaks) and np.allclose(s.values, f.values, rtol=1e-15)

    def test_increasing_pair(self):
        assert sinnamon_level(StepFunction([0, 0.5, 1], [0.0, 2.0]), w1) == StepFunction(
            [0, 1], [1.0])

    def test_dip_is_averaged(self):
        s = sinnamon_level(StepFunction.from_sequence([1, 0, 1]), Weight.constant(1.0, 3.0))
        assert s.values.tolist() == [1.0, 0.5]
        assert s.breaks.tolist() == [0, 1, 3]


class TestCrosscheck:
    def test_decreasing_input_has_zero_deviation(self):
        w = Weight([0, 0.5, 1], [2.0, 1.0])
        assert crosscheck_level(StepFunction(w.breaks, [4.0, 1.0]), w).max_deviation == 0

    def test_characteristic(self):
        r = crosscheck_level(characteristic(0, 1, 1), w21)
        assert r.agrees

    @given(step_functions(max_cells=16), weights(max_cells=8))
    def test_random_pairs_agree(self, f, w):
        assert crosscheck_level(f, w).max_deviation < 1e-10


class TestInverseWeight:
    def test_no_level_intervals_keeps_weight(self):
        w = Weight([0, 0.5, 1], [2.0, 1.0])
        fs = StepFunction(w.breaks, [6.0, 1.0])
        assert inverse_level_weight(fs, w) == w.as_step()

    def test_characteristic(self):
        inv = inverse_level_weight(characteristic(0, 1, 1), w21)
        assert inv.values == pytest.approx([1.5])

    def test_rejects_increasing(self):
        with pytest.raises(DomainError):
            inverse_level_weight(StepFunction([0, 0.5, 1], [0.0, 1.0]), w1)

    @given(step_functions(), weights())
    def test_mass_on_intervals_and_majorization(self, f, w):
        fs = rearrange(f)
        dec = halperin_level(fs, w)
        inv = dec.inverse_weight
        for iv in dec.intervals:
            a, b = iv.a, iv.b
            assert inv.primitive(b) - inv.primitive(a) == pytest.approx(
                w.W(b) - w.W(a), rel=1e-12)
        assert submajorizes(w.as_step(), inv, tol=1e-12)


def test_maximal_intervals_agree_with_halperin():
    rng = np.random.default_rng(7)
    from orlicz_lorentz import instances as inst
    for _ in range(30):
        f, w = inst.random_pair(rng, 12)
        exact = [(float(a), float(b)) for a, b in maximal_level_intervals(f, w)]
        mine = [(iv.a, iv.b) for iv in halperin_level(f, w).intervals]
        assert mine == pytest.approx(exact)


def test_exact_oracle_uses_rationals():
    g, r = level_ratios_exact(StepFunction([0, 0.5, 1], [0.0, 2.0]), w1)
    assert r == [Fraction(1), Fraction(1)]
