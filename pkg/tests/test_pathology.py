import math

import mpmath
import numpy as np
import pytest
from hypothesis import given

from conftest import step_functions, weights
from orlicz_lorentz import DomainError, OrliczFunction, RejectedInputError, Weight, rearrange
from orlicz_lorentz.level import halperin_level
from orlicz_lorentz.pathology import (
    build_disjoint_family,
    build_family,
    check_block_modular,
    comparison_counterexample,
    delta2_witness_sequence,
    embedding_bound,
    linf_embedding_check,
    verify_family,
)

exp_n = OrliczFunction.exp_n()
p2, p3 = OrliczFunction.power(2), OrliczFunction.power(3)
w1 = Weight.constant(1.0, 1.0)


@pytest.fixture(scope="module")
def family():
    return build_family(exp_n, w1, 3, 20)


@pytest.fixture(scope="module")
def report(family):
    return verify_family(family, 1.5, 1e3)


class TestWitnesses:
    def test_exp_n_ladder(self):
        seq = delta2_witness_sequence(exp_n, 6)
        assert seq.passed and len(seq.u_seq) == 6
        assert all(m > 0 for m in seq.log_margins)
        with mpmath.workdps(50):
            for n, u in enumerate(seq.u_seq, start=1):
                u = mpmath.mpf(u)
                assert exp_n.value_mp((1 + mpmath.mpf(1) / n) * u) > 2**n * exp_n.value_mp(u)

    def test_power_fails_once_doubling_outgrows_the_ratio(self):
        # (1 + 1/n)^2 > 2^n only for n = 1
        seq = delta2_witness_sequence(p2, 6)
        assert not seq.passed and seq.failed_at == 2

    def test_exp_plain_ladder(self):
        assert delta2_witness_sequence(OrliczFunction.exp_plain(), 6).passed

    def test_witnesses_increase(self):
        seq = delta2_witness_sequence(exp_n, 12)
        assert all(b > a for a, b in zip(seq.u_seq, seq.u_seq[1:]))


class TestFamily:
    def test_block_bound(self, family, report):
        assert report.block_bound_ok
        for k, q in enumerate(report.block_q, start=1):
            assert q <= 2.0**-k + 1e-10

    def test_cut_points_match_masses(self, family):
        with mpmath.workdps(50):
            for n in range(1, family.n_max + 1):
                piece = family.t_seq[n - 1] - family.t_seq[n]
                target = 1 / (2**n * exp_n.value_mp(family.u_seq[n - 1]))
                assert abs(piece - target) <= 1e-10 * target

    def test_supports_disjoint(self, family):
        for k in range(1, family.k_count):
            assert family.support(k)[1] <= family.support(k + 1)[0]

    def test_blocks_are_their_own_level_functions(self, family):
        for k in range(1, family.k_count + 1):
            g = rearrange(family.block_step(k, 4))
            assert halperin_level(g, family.w).intervals == ()
            check_block_modular(family, k, 4)

    def test_single_cell_smoke(self):
        fam = build_family(exp_n, w1, 1, 1)
        r = verify_family(fam)
        n1 = fam.subsequence[0]
        assert r.block_q[0] == pytest.approx(2.0 ** -(n1 + 1), rel=1e-12)

    def test_infeasible_domain_rejected(self):
        with pytest.raises(DomainError):
            build_disjoint_family(exp_n, w1, [1.0, 2.0], 3, 5)


class TestVerify:
    def test_divergence_above_one(self, report):
        assert report.diverges
        assert all(t is not None and t <= 40 for t in report.terms_to_threshold)

    def test_unit_scale_stays_bounded(self, family):
        r = verify_family(family, 1.0)
        assert not r.diverges
        for k, sums in enumerate(r.partial_sums, start=1):
            assert max(sums) <= 2.0**-k + 1e-10

    def test_block_norms_near_one(self, report):
        for n in report.block_norms:
            assert 1 - report.truncation_allowance <= n <= 1 + 1e-8

    def test_norm_of_sum(self, report):
        assert report.norm_in_range and report.passed

    def test_monotone_in_scale(self, family):
        a = verify_family(family, 1.2).partial_sums
        b = verify_family(family, 1.5).partial_sums
        for pa, pb in zip(a, b):
            assert all(y >= x for x, y in zip(pa, pb))


class TestLinf:
    def test_constant_sequence(self, family, report):
        r = linf_embedding_check(family, [1, 1, 1], 0.9, report.norm_of_sum)
        assert r.passed and r.lower_evidence and r.upper_ok

    def test_unit_vector_is_the_first_block(self, family):
        r = linf_embedding_check(family, [1], 0.9)
        single = verify_family(family, 1 / 0.9)
        assert r.passed and r.k0 == 1
        assert r.partial_sums[-1] == pytest.approx(single.partial_sums[0][-1], rel=1e-12)

    def test_geometric_sequence_uses_first_block(self, family):
        r = linf_embedding_check(family, [1, 0.5, 0.25], 0.95)
        assert r.passed and r.k0 == 1

    @pytest.mark.parametrize("lam", [0.0, 1.0, 1.5])
    def test_lambda_range(self, family, lam):
        with pytest.raises(RejectedInputError):
            linf_embedding_check(family, [1, 1, 1], lam)


class TestComparison:
    @pytest.fixture(scope="class")
    @classmethod
    def counter(cls):
        return comparison_counterexample(exp_n, p2, w1, 40, (0.1,), 1e3)

    def test_counterexample(self, counter):
        assert not counter.order_holds
        assert counter.q_phi2 < 1 and counter.q_phi2_below_one
        assert counter.exceeded[0.1]

    def test_constructed_function_is_its_level_function(self, counter):
        assert counter.f_is_level
        assert counter.f.is_nonincreasing()

    def test_order_holds_between_powers(self):
        r = comparison_counterexample(p2, p3, w1, 10)
        assert r.order_holds and r.f is None

    @given(step_functions(), weights())
    def test_forward_embedding(self, f, w):
        r = embedding_bound(p2, p3, w, f, 1.0, 1.0)
        assert r.holds
