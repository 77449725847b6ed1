import math

import numpy as np
import pytest

from plankforge import (
    ExponentPair,
    Functional,
    InsufficientDataError,
    InvalidInputError,
    NormFamily,
    ResourceLimitError,
    WeightMatrix,
    cotype_constant_estimate,
    cotype_ratio,
    dual_norm,
    euclidean,
    holder_row_check,
    lp_space,
    necessary_condition_check,
    norm,
    pattern_from_index,
    prefix_weights,
    random_unit,
    scaled_basis_sequence,
    signed_combination_norms,
    sup_functional_bound,
    sup_space,
)


def orthonormal_set(n):
    space = euclidean(n)
    return space, [space.basis_vector(k) for k in range(1, n + 1)]


class TestSignPatterns:
    def test_first_sign_fixed(self):
        for idx in range(8):
            pattern = pattern_from_index(idx, 4)
            assert pattern[0] == 1

    def test_patterns_distinct(self):
        pats = {tuple(pattern_from_index(i, 4)) for i in range(8)}
        assert len(pats) == 8

    def test_norm_enumeration_matches_loop(self):
        space, xs = orthonormal_set(3)
        xs[1] = xs[1].scaled(2.0)
        norms = signed_combination_norms(space, xs)
        for idx, got in enumerate(norms):
            signs = pattern_from_index(idx, 3)
            combo = sum(
                (s * x.coords for s, x in zip(signs, xs)), np.zeros(3)
            )
            assert got == pytest.approx(math.sqrt(float(combo @ combo)))


class TestCotypeRatio:
    def test_orthonormal_is_exactly_one(self):
        space, xs = orthonormal_set(6)
        rep = cotype_ratio(space, xs, 2.0)
        assert rep.ratio == 1.0
        assert rep.enumerated and rep.exact

    def test_single_vector(self):
        space = euclidean(3)
        rep = cotype_ratio(space, [space.basis_vector(1).scaled(3.0)], 2.0)
        assert rep.ratio == pytest.approx(1.0)
        assert rep.pattern == [1]

    def test_sup_space_rate(self):
        # unit coordinate vectors in the sup norm: every signed sum has
        # norm 1 while the coordinate budget is sqrt(n)
        n = 8
        space = sup_space(n)
        xs = [space.basis_vector(k) for k in range(1, n + 1)]
        rep = cotype_ratio(space, xs, 2.0)
        assert abs(rep.ratio - n ** -0.5) <= 1e-12

    def test_mean_square_identity(self):
        # orthonormal directions: the average of squared signed-sum norms
        # over all patterns equals the sum of squared lengths
        space, xs = orthonormal_set(5)
        xs = [x.scaled(1.0 + 0.3 * k) for k, x in enumerate(xs)]
        norms = signed_combination_norms(space, xs)
        mean_sq = float(np.mean(np.asarray(norms) ** 2))
        total = sum(norm(x) ** 2 for x in xs)
        assert mean_sq == pytest.approx(total, rel=1e-9)

    def test_pattern_recomputes_ratio(self):
        space = sup_space(5)
        xs = [random_unit(space, s) for s in range(5)]
        rep = cotype_ratio(space, xs, 2.0)
        combo = sum(
            (s * x.coords for s, x in zip(rep.pattern, xs)), np.zeros(5)
        )
        from plankforge.spaces import Vector

        budget = sum(norm(x) ** 2 for x in xs) ** 0.5
        recomputed = norm(Vector(space, combo)) / budget
        assert recomputed == pytest.approx(rep.ratio, abs=1e-12)

    def test_euclidean_ratio_at_least_one(self):
        # the max over sign patterns dominates the root mean square, which
        # equals the coordinate budget in an inner-product space
        space = euclidean(4)
        xs = [random_unit(space, s).scaled(1.0 + s) for s in range(4)]
        rep = cotype_ratio(space, xs, 2.0)
        assert rep.ratio >= 1.0 - 1e-12

    def test_enumeration_cap(self):
        space, xs = orthonormal_set(25)
        with pytest.raises(ResourceLimitError):
            cotype_ratio(space, xs, 2.0)

    def test_sampling_mode_lower_bound(self):
        space, xs = orthonormal_set(25)
        rep = cotype_ratio(space, xs, 2.0, sampling=True, n_samples=256)
        assert rep.enumerated == 256
        assert not rep.exact
        assert 0 < rep.ratio <= 1.0 + 1e-12

    def test_sampling_vs_enumeration(self):
        space = sup_space(6)
        xs = [space.basis_vector(k) for k in range(1, 7)]
        full = cotype_ratio(space, xs, 2.0)
        sampled = cotype_ratio(space, xs, 2.0, sampling=True, n_samples=64)
        assert sampled.ratio <= full.ratio + 1e-12

    def test_p_infinity_budget(self):
        space, xs = orthonormal_set(3)
        rep = cotype_ratio(space, xs, math.inf)
        # budget is max norm = 1, best signed sum has norm sqrt(3)
        assert rep.ratio == pytest.approx(math.sqrt(3))

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            cotype_ratio(euclidean(2), [], 2.0)


class TestCotypeConstantEstimate:
    def test_orthonormal_sets(self):
        space, xs = orthonormal_set(6)
        sets = [xs[:k] for k in range(2, 7)]
        est = cotype_constant_estimate(space, sets, 2.0)
        assert est == pytest.approx(1.0)

    def test_sup_sets_take_largest(self):
        space = sup_space(10)
        sets = [
            [space.basis_vector(k) for k in range(1, n + 1)]
            for n in range(2, 11)
        ]
        est = cotype_constant_estimate(space, sets, 2.0)
        assert abs(est - 10 ** -0.5) <= 1e-12

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            cotype_constant_estimate(euclidean(2), [], 2.0)


class TestHolderRowCheck:
    def test_single_support_is_tight(self):
        matrix = WeightMatrix([{1: 1.0}])
        space = euclidean(4)
        xs = [space.basis_vector(1).scaled(3.0)]
        check = holder_row_check(matrix, xs, ExponentPair.from_p(2.0), 1)
        assert check.passed
        # w * ||x|| times ||x||^{-1} collapses to 1 exactly
        assert check.product == pytest.approx(1.0, abs=1e-12)

    def test_two_point_hand_value(self):
        matrix = WeightMatrix([{1: 0.5, 2: 0.5}])
        space = euclidean(2)
        xs = [space.basis_vector(1), space.basis_vector(2).scaled(2.0)]
        check = holder_row_check(matrix, xs, ExponentPair.from_p(2.0), 1)
        # weighted factor sqrt(.25 + 1) and dual factor sqrt(1 + .25)
        assert check.factor_weighted == pytest.approx(math.sqrt(1.25))
        assert check.factor_dual == pytest.approx(math.sqrt(1.25))
        assert check.product == pytest.approx(1.25)
        assert check.passed

    def test_prefix_rows_all_pass(self):
        fam = NormFamily.power(1, 0.5)
        n = 1000
        matrix = prefix_weights(fam, n)
        xs = scaled_basis_sequence(euclidean(n), fam, n)
        pair = ExponentPair.from_p(2.0)
        for row in (1, 2, 5, 77, 500, 1000):
            check = holder_row_check(matrix, xs, pair, row)
            assert check.passed, row
            assert check.product >= 1.0 - 1e-9

    def test_lp_exponents(self):
        fam = NormFamily.power(1, 0.5)
        n = 60
        matrix = prefix_weights(fam, n)
        space = lp_space(3.0, n)
        xs = [space.basis_vector(k).scaled(fam.value(k)) for k in range(1, n + 1)]
        check = holder_row_check(matrix, xs, ExponentPair.from_p(3.0), n)
        assert check.passed

    def test_max_form_at_p_infinity(self):
        matrix = WeightMatrix([{1: 0.5, 2: 0.5}])
        space = euclidean(2)
        xs = [space.basis_vector(1), space.basis_vector(2).scaled(4.0)]
        check = holder_row_check(matrix, xs, ExponentPair.from_p(math.inf), 1)
        # weighted factor max(0.5, 2.0); dual factor 1 + 0.25
        assert check.factor_weighted == pytest.approx(2.0)
        assert check.factor_dual == pytest.approx(1.25)
        assert check.passed

    def test_zero_norm_rejected(self):
        matrix = WeightMatrix([{1: 1.0}])
        space = euclidean(2)
        with pytest.raises(InvalidInputError):
            holder_row_check(matrix, [space.zero()], ExponentPair.from_p(2.0), 1)

    def test_row_beyond_sequence(self):
        matrix = WeightMatrix([{1: 0.5, 2: 0.5}])
        space = euclidean(2)
        with pytest.raises(InvalidInputError):
            holder_row_check(
                matrix, [space.basis_vector(1)], ExponentPair.from_p(2.0), 1
            )


class TestNecessaryConditionCheck:
    def test_divergent_family_consistent(self):
        rep = necessary_condition_check(
            NormFamily.power(1, 0.5), ExponentPair.from_p(2.0), 1000
        )
        assert rep.verdict == "divergent"
        assert rep.consistent is True
        assert rep.full_sum > rep.half_sum > rep.quarter_sum

    def test_harmonic_reciprocals_divergent_at_p_prime_one(self):
        # a_n = n with exponent 1: reciprocals sum like the harmonic series
        rep = necessary_condition_check(
            NormFamily.power(1, 1.0), ExponentPair.from_p_prime(1.0), 512
        )
        assert rep.verdict == "divergent"
        assert rep.consistent is True

    def test_convergent_family_consistent(self):
        rep = necessary_condition_check(
            NormFamily.power(1, 1.5), ExponentPair.from_p(2.0), 400
        )
        assert rep.verdict == "convergent"
        assert rep.consistent is True

    def test_explicit_family_indeterminate(self):
        fam = NormFamily.explicit(np.arange(1.0, 65.0))
        rep = necessary_condition_check(fam, ExponentPair.from_p(2.0), 64)
        assert rep.verdict is None
        assert rep.consistent == "indeterminate"

    def test_short_horizon_rejected(self):
        with pytest.raises(InsufficientDataError):
            necessary_condition_check(
                NormFamily.power(1, 0.5), ExponentPair.from_p(2.0), 7
            )


class TestSupFunctionalBound:
    def test_one_hot_rows_unit_vectors(self):
        n = 12
        space = euclidean(n)
        xs = [space.basis_vector(k) for k in range(1, n + 1)]
        matrix = WeightMatrix([{k: 1.0} for k in range(1, n + 1)])
        fs = [
            Functional(space, random_unit(space, s).coords) for s in range(20)
        ]
        bound = sup_functional_bound(matrix, xs, fs)
        assert bound <= 1.0 + 1e-9
        assert bound > 0.0

    def test_matches_direct_computation(self):
        fam = NormFamily.power(1, 0.5)
        n = 30
        space = euclidean(n)
        matrix = prefix_weights(fam, n)
        xs = scaled_basis_sequence(space, fam, n)
        f = Functional(space, random_unit(space, 3).coords)
        got = sup_functional_bound(matrix, xs, [f], p_prime=2.0)
        best = 0.0
        for row in range(1, n + 1):
            total = sum(
                w * abs(float(np.vdot(f.coords, xs[m - 1].coords))) ** 2
                for m, w in matrix.row_dict(row).items()
            )
            best = max(best, total / (dual_norm(f) ** 2))
        assert got == pytest.approx(best, rel=1e-12)

    def test_empty_sample_rejected(self):
        matrix = WeightMatrix([{1: 1.0}])
        space = euclidean(2)
        with pytest.raises(InvalidInputError):
            sup_functional_bound(matrix, [space.basis_vector(1)], [])

    def test_zero_functional_rejected(self):
        matrix = WeightMatrix([{1: 1.0}])
        space = euclidean(2)
        f = Functional(space, np.zeros(2))
        with pytest.raises(InvalidInputError):
            sup_functional_bound(matrix, [space.basis_vector(1)], [f])

    def test_row_support_beyond_sequence(self):
        matrix = WeightMatrix([{1: 0.5, 2: 0.5}])
        space = euclidean(2)
        f = Functional(space, space.basis_vector(1).coords)
        with pytest.raises(InvalidInputError):
            sup_functional_bound(matrix, [space.basis_vector(1)], [f])
