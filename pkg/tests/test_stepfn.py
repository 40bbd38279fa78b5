import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import step_functions, weights
from orlicz_lorentz import RejectedInputError, StepFunction, Weight, characteristic, rearrange
from orlicz_lorentz.errors import DomainError
from orlicz_lorentz.stepfn import (
    distribution,
    hardy_pairing_check,
    integrate,
    merge_grids,
    submajorizes,
)

seq = StepFunction.from_sequence


class TestConstruction:
    def test_adjacent_equal_cells_merge(self):
        f = StepFunction([0, 1, 2], [1.0, 1.0])
        assert f.breaks.tolist() == [0.0, 2.0]
        assert f.values.tolist() == [1.0]

    @pytest.mark.parametrize("breaks, values", [
        ([0, 1], [-1.0]),
        ([0, 1, 1], [1.0, 2.0]),
        ([0.5, 1], [1.0]),
        ([0, 1], [np.inf]),
        ([0, 1, 2], [1.0]),
    ])
    def test_rejects_malformed(self, breaks, values):
        with pytest.raises(RejectedInputError):
            StepFunction(breaks, values)

    def test_weight_must_be_positive_and_nonincreasing(self):
        with pytest.raises(RejectedInputError):
            Weight([0, 1, 2], [1.0, 2.0])
        with pytest.raises(RejectedInputError):
            Weight([0, 1], [0.0])

    def test_weight_primitive_is_exact_at_breaks(self):
        w = Weight([0, 0.5, 1.5], [3.0, 1.0])
        assert w.W(np.array([0.0, 0.5, 1.5])).tolist() == [0.0, 1.5, 2.5]
        assert w.W_inverse(2.0) == pytest.approx(1.0)

    @given(step_functions())
    def test_json_and_csv_roundtrip(self, f):
        assert StepFunction.from_json(f.to_json()) == f
        assert StepFunction.from_csv(f.to_csv()) == f
        assert StepFunction.from_dict(json.loads(json.dumps(f.to_dict()))) == f

    def test_weight_dict_roundtrip(self):
        w = Weight([0, 0.25, 1], [2.0, 0.5])
        back = Weight.from_dict(w.to_dict())
        assert isinstance(back, Weight) and back == w


class TestIntegrate:
    def test_whole_cells(self):
        assert integrate(seq([1, 3]), 0, 2) == 4

    def test_partial_cells(self):
        assert integrate(seq([1, 3]), 0.5, 1.5) == 2

    def test_empty_interval(self):
        assert integrate(StepFunction([0, 1], [2.0]), 0.5, 0.5) == 0

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            integrate(seq([1]), 0, 2)


class TestDistribution:
    @pytest.mark.parametrize("lam, expected", [(1.5, 2), (3, 0), (0, 3)])
    def test_counts_cells_strictly_above(self, lam, expected):
        assert distribution(seq([1, 3, 2]), lam) == expected


class TestRearrange:
    def test_sorts_unit_cells(self):
        assert rearrange(seq([1, 3, 2])).values.tolist() == [3, 2, 1]

    def test_decreasing_input_unchanged(self):
        f = seq([3, 2, 1])
        assert rearrange(f) == f

    def test_cell_lengths_travel_with_values(self):
        r = rearrange(StepFunction([0, 2, 3], [0.0, 5.0]))
        assert r.breaks.tolist() == [0, 1, 3]
        assert r.values.tolist() == [5, 0]

    @given(step_functions(), st.floats(0, 4))
    def test_equimeasurable(self, f, lam):
        assert distribution(rearrange(f), lam) == pytest.approx(distribution(f, lam), abs=1e-12)

    @given(step_functions())
    def test_idempotent_and_nonincreasing(self, f):
        r = rearrange(f)
        assert r.is_nonincreasing()
        assert rearrange(r) == r
        assert r.integral() == pytest.approx(f.integral(), rel=1e-12)


class TestSubmajorization:
    def test_spread_mass_is_below_concentrated(self):
        assert submajorizes(seq([2, 0]), seq([1, 1]))

    def test_concentrated_mass_is_not_below_spread(self):
        assert not submajorizes(seq([1, 1]), seq([2, 0]))

    @given(step_functions())
    def test_reflexive(self, f):
        assert submajorizes(f, f)

    @given(step_functions(), step_functions(), step_functions())
    def test_transitive(self, f, g, h):
        if submajorizes(g, f) and submajorizes(h, g):
            assert submajorizes(h, f, tol=1e-12)


class TestHardyPairing:
    def test_example_pairing(self):
        r = hardy_pairing_check(seq([1, 1]), seq([2, 0]), seq([1, 0.5]))
        assert (r.lhs, r.rhs, r.holds) == (1.5, 2.0, True)

    def test_constant_g_pairs_with_totals(self):
        r = hardy_pairing_check(seq([1, 1]), seq([2, 0]), seq([3, 3]))
        assert r.lhs == pytest.approx(6.0) and r.rhs == pytest.approx(6.0) and r.holds

    def test_identical_functions_give_equality(self):
        f = seq([1, 2, 0.5])
        r = hardy_pairing_check(f, f, seq([2, 1, 1]))
        assert r.lhs == r.rhs

    def test_increasing_g_rejected(self):
        with pytest.raises(RejectedInputError):
            hardy_pairing_check(seq([1, 1]), seq([2, 0]), seq([0.5, 1]))

    @given(step_functions(), step_functions(positive=True))
    def test_holds_for_rearrangement_against_decreasing_weight(self, f, g):
        # f is submajorized by its own rearrangement
        r = hardy_pairing_check(f, rearrange(f), rearrange(g))
        assert r.holds


class TestArithmetic:
    @given(step_functions(), step_functions())
    def test_merged_grid_sum(self, f, g):
        s = f + g
        grid = merge_grids(f, g)
        assert np.allclose(s.on_grid(grid), f.on_grid(grid) + g.on_grid(grid))

    def test_characteristic(self):
        c = characteristic(0.25, 0.5, 1.0, 2.0)
        assert c.breaks.tolist() == [0, 0.25, 0.5, 1]
        assert c.values.tolist() == [0, 2, 0]
        assert c.integral() == 0.5

    def test_pad_extends_by_zero(self):
        f = seq([1]).pad(3)
        assert f.domain == 3 and f.integral() == 1

    @given(weights())
    def test_weight_inverse_roundtrip(self, w):
        t = np.linspace(0, w.domain, 9)
        assert np.allclose(w.W_inverse(w.W(t)), t, atol=1e-12)
