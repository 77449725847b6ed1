import math

import numpy as np
import pytest

from plankforge import (
    BlockPartition,
    BoundViolationError,
    ConstructionImpossibleError,
    ExponentPair,
    Functional,
    InvalidInputError,
    NoCertificateError,
    NormFamily,
    ResourceLimitError,
    Vector,
    block_basis,
    block_distortion,
    block_partition,
    block_transform_bound,
    block_weights,
    dual_norm,
    euclidean,
    lp_space,
    min_on_support,
    norm,
    pair,
    parse_family,
    prefix_weights,
    random_functional,
    random_rotation,
    scaled_basis_sequence,
    transform_value,
    validate_weights,
    ScalarSequence,
)


def greedy_oracle(term, n_blocks, growth_target):
    """Scalar-loop reimplementation of the greedy partition for cross-checks."""
    boundaries = [0]
    sums = []
    first = None
    pos = 0
    for k in range(1, n_blocks + 1):
        target = growth_target * k
        if first is not None:
            target = max(target, first)
        s = 0.0
        count = 0
        while s < target or count == 0:
            pos += 1
            count += 1
            s += term(pos)
        boundaries.append(pos)
        sums.append(s)
        if first is None:
            first = s
    return boundaries, sums


class TestNormFamily:
    def test_power_values(self):
        fam = NormFamily.power(2, 0.5)
        assert fam.value(4) == pytest.approx(4.0)
        np.testing.assert_allclose(fam.values_upto(3), [2.0, 2 * 2**0.5, 2 * 3**0.5])

    def test_powerlog_values(self):
        fam = NormFamily.powerlog(1.0, -1.0)
        assert fam.value(1) == pytest.approx(1.0 / math.log(2.0))

    def test_explicit_values(self):
        fam = NormFamily.explicit([3.0, 1.5, 7.0])
        assert fam.value(2) == 1.5
        with pytest.raises(InvalidInputError):
            fam.value(4)

    def test_explicit_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            NormFamily.explicit([1.0, -2.0])

    def test_divergence_certificates(self):
        assert NormFamily.power(1, 0.5).diverges(2.0)  # harmonic
        assert not NormFamily.power(1, 0.5).diverges(3.0)  # zeta(3/2)
        assert not NormFamily.power(1, 1).diverges(2.0)
        assert NormFamily.power(1, 1).diverges(1.0)
        # boundary cases with logs: 1/(n log n) diverges, 1/(n log^2 n) converges
        assert NormFamily.powerlog(0.5, 0.5).diverges(2.0)
        assert not NormFamily.powerlog(0.5, 1.0).diverges(2.0)

    def test_explicit_has_no_certificate(self):
        with pytest.raises(NoCertificateError):
            NormFamily.explicit([1.0, 2.0]).diverges(2.0)

    def test_partial_sum_harmonic(self):
        fam = NormFamily.power(1, 0.5)
        assert fam.partial_sum(2.0, 4) == pytest.approx(25.0 / 12.0, abs=1e-15)
        assert fam.partial_sum(2.0, 1) == 1.0

    def test_partial_sum_pi_sq_over_6(self):
        s = NormFamily.power(1, 1).partial_sum(2.0, 10_000)
        assert 1.6448 <= s <= 1.6450
        assert s + NormFamily.power(1, 1).tail_bound(2.0, 10_000) >= math.pi**2 / 6

    def test_tail_bound_dominates_true_tail(self):
        fam = NormFamily.power(1, 1)
        far = fam.partial_sum(2.0, 40_000) - fam.partial_sum(2.0, 100)
        assert far <= fam.tail_bound(2.0, 100)

    def test_tail_bound_powerlog_via_quadrature(self):
        fam = NormFamily.powerlog(0.5, 1.0)  # sum 1/(n log^2(n+1)) converges
        far = fam.partial_sum(2.0, 20_000) - fam.partial_sum(2.0, 50)
        assert far <= fam.tail_bound(2.0, 50)

    def test_tail_bound_requires_convergence(self):
        with pytest.raises(InvalidInputError):
            NormFamily.power(1, 0.5).tail_bound(2.0, 10)

    def test_descriptor_parsing(self):
        fam = parse_family("power:1:0.5")
        assert fam.variant == "power" and fam.alpha == 0.5
        fam = parse_family("powerlog:2:-1")
        assert fam.variant == "powerlog" and fam.beta == -1.0

    def test_descriptor_explicit_file(self, tmp_path):
        path = tmp_path / "vals.csv"
        path.write_text("1.0\n2.0\n4.0\n")
        fam = parse_family(f"explicit:@{path}")
        assert fam.values.tolist() == [1.0, 2.0, 4.0]

    @pytest.mark.parametrize("text", ["power:1", "power:a:b", "explicit:vals", "geom:2:2"])
    def test_bad_descriptors(self, text):
        with pytest.raises(InvalidInputError):
            parse_family(text)


class TestExponentPair:
    def test_from_p(self):
        pr = ExponentPair.from_p(3.0)
        assert pr.p_prime == pytest.approx(1.5)
        assert ExponentPair.from_p(math.inf).p_prime == 1.0
        assert ExponentPair.from_p(2.0).p_prime == 2.0

    def test_from_p_prime(self):
        assert ExponentPair.from_p_prime(1.5).p == pytest.approx(3.0)
        assert ExponentPair.from_p_prime(1.0).p == math.inf

    def test_conjugacy_enforced(self):
        with pytest.raises(InvalidInputError):
            ExponentPair(3.0, 1.6)
        with pytest.raises(InvalidInputError):
            ExponentPair(1.5, 3.0)  # p below 2


class TestScaledBasisSequence:
    def test_canonical_form(self):
        fam = NormFamily.power(1, 0.5)
        xs = scaled_basis_sequence(euclidean(4), fam, 4)
        np.testing.assert_allclose(xs[3].coords, [0, 0, 0, 2.0])
        for n, x in enumerate(xs, start=1):
            assert norm(x) == pytest.approx(fam.value(n), abs=1e-12)

    def test_rotation_preserves_norms_and_orthogonality(self):
        fam = NormFamily.power(1, 0.5)
        space = euclidean(6)
        xs = scaled_basis_sequence(space, fam, 6, rotation_seed=42)
        for n, x in enumerate(xs, start=1):
            assert abs(norm(x) - fam.value(n)) <= 1e-9
        for i in range(6):
            for j in range(i + 1, 6):
                assert abs(pair(Functional(space, xs[i].coords), xs[j])) <= 1e-9

    def test_rotation_matches_shared_seed(self):
        fam = NormFamily.power(1, 1)
        space = euclidean(5)
        xs = scaled_basis_sequence(space, fam, 5, rotation_seed=7)
        q = random_rotation(space, 7).matrix
        np.testing.assert_allclose(xs[2].coords, 3.0 * q[:, 2], atol=1e-12)

    def test_dimension_guard(self):
        with pytest.raises(InvalidInputError):
            scaled_basis_sequence(euclidean(3), NormFamily.power(1, 1), 4)

    def test_needs_euclidean(self):
        with pytest.raises(InvalidInputError):
            scaled_basis_sequence(lp_space(3, 4), NormFamily.power(1, 1), 4)


class TestPrefixWeights:
    def test_single_row(self):
        W = prefix_weights(NormFamily.power(1, 0.5), 1)
        assert W.row_dict(1) == {1: 1.0}

    def test_row_two_hand_values(self):
        W = prefix_weights(NormFamily.power(1, 0.5), 2)
        row = W.row_dict(2)
        assert row[1] == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert row[2] == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_support_is_full_prefix(self):
        W = prefix_weights(NormFamily.power(1, 1), 6)
        assert W.support(4) == (1, 4)

    def test_validates(self):
        # the divergent family drives every column weight toward 0; the
        # convergent one leaves p_{n,1} near 1/zeta(2), so only the
        # permissive threshold is appropriate there
        W = prefix_weights(NormFamily.power(1, 0.5), 300)
        assert validate_weights(W, 1e-12, 0.5).passed
        W = prefix_weights(NormFamily.power(1, 1), 300)
        rep = validate_weights(W, 1e-12, 1.1)
        assert rep.passed
        assert rep.late_column_max > 0.5  # stuck mass at column 1

    def test_column_mass_separates_families(self):
        convergent = prefix_weights(NormFamily.power(1, 1), 300)
        assert not validate_weights(convergent, 1e-12, 0.5).passed

    def test_constant_one_row_sums(self):
        W = prefix_weights(NormFamily.power(1, 0.5), 50)
        ones = ScalarSequence(np.ones(50))
        for n in (1, 7, 50):
            assert transform_value(W, ones, n) == pytest.approx(1.0, abs=1e-12)


class TestBlockPartition:
    def test_greedy_matches_scalar_oracle(self):
        fam = NormFamily.power(1, 0.5)
        part = block_partition(fam, 2.0, 5, 1.0)
        bounds, sums = greedy_oracle(lambda m: 1.0 / m, 5, 1.0)
        assert part.boundaries.tolist() == bounds
        np.testing.assert_allclose(part.sums, sums, rtol=1e-12)

    def test_growth_targets_met(self):
        part = block_partition(NormFamily.power(1, 0.5), 2.0, 3, 1.0)
        for k in range(1, 4):
            assert part.sums[k - 1] >= 1.0 * k
        assert part.sums[-1] >= part.sums[0]

    def test_single_block_zero_target(self):
        part = block_partition(NormFamily.power(1, 0.5), 2.0, 1, 0.0)
        assert part.n_blocks == 1
        assert part.boundaries.tolist() == [0, 1]

    def test_convergent_family_impossible(self):
        with pytest.raises(ConstructionImpossibleError):
            block_partition(NormFamily.power(1, 1), 2.0, 3, 1.0)

    def test_horizon_cap(self):
        with pytest.raises(ResourceLimitError):
            block_partition(NormFamily.power(1, 0.5), 2.0, 6, 1.0, horizon_cap=10_000)

    def test_recorded_sums_match_recomputation(self):
        fam = NormFamily.power(1, 0.5)
        part = block_partition(fam, 2.0, 4, 1.0)
        np.testing.assert_allclose(part.recomputed_sums(fam), part.sums, atol=1e-12)

    def test_from_family_and_json(self):
        fam = NormFamily.explicit([2.0, 2.0, 1.0])
        part = BlockPartition.from_family(fam, [0, 2, 3], 2.0)
        assert part.sums.tolist() == [0.5, 1.0]
        back = BlockPartition.from_json_obj(part.to_json_obj())
        assert back.boundaries.tolist() == [0, 2, 3]
        assert back.p_prime == 2.0

    def test_structural_guards(self):
        with pytest.raises(InvalidInputError):
            BlockPartition(np.array([1, 2]), np.array([1.0]), 2.0)  # must start at 0
        with pytest.raises(InvalidInputError):
            BlockPartition(np.array([0, 2, 2]), np.array([1.0, 1.0]), 2.0)


class TestBlockWeights:
    def test_two_equal_values_single_block(self):
        fam = NormFamily.explicit([5.0, 5.0])
        part = BlockPartition.from_family(fam, [0, 2], 2.0)
        W = block_weights(fam, part)
        row = W.row_dict(1)
        assert row[1] == pytest.approx(0.5)
        assert row[2] == pytest.approx(0.5)

    def test_supports_are_blocks_only(self):
        fam = NormFamily.power(1, 0.5)
        part = block_partition(fam, 2.0, 3, 1.0)
        W = block_weights(fam, part)
        for k in range(1, 4):
            lo, hi = part.block(k)
            assert W.support(k) == (lo, hi)

    def test_weight_formula(self):
        fam = NormFamily.power(1, 0.5)
        part = block_partition(fam, 2.0, 3, 1.0)
        W = block_weights(fam, part)
        row2 = W.row_dict(2)
        lo, hi = part.block(2)
        for m in range(lo, hi + 1):
            assert row2[m] == pytest.approx((1.0 / m) / part.sums[1], rel=1e-12)

    def test_rows_validate(self):
        fam = NormFamily.power(1, 0.5)
        part = block_partition(fam, 2.0, 4, 1.0)
        assert validate_weights(block_weights(fam, part), 1e-12, 0.5).passed


class TestBlockBasis:
    def setup_method(self):
        self.fam = NormFamily.power(1, 0.5)
        self.part = block_partition(self.fam, 1.5, 3, 1.0)
        self.space = lp_space(3, self.part.horizon)

    def test_canonical_vectors(self):
        basis = block_basis(self.space, self.part)
        assert len(basis) == self.part.horizon
        for n, e in enumerate(basis, start=1):
            assert norm(e) == 1.0
            assert e.coords[n - 1] == 1.0

    def test_block_combination_norm_exact(self):
        # e_3 + e_4 in one lp(3) block has norm 2^(1/3)
        fam = NormFamily.explicit([1.0] * 6)
        part = BlockPartition.from_family(fam, [0, 2, 6], 1.5)
        space = lp_space(3, 6)
        basis = block_basis(space, part)
        combo = Vector(space, basis[2].coords + basis[3].coords)
        assert norm(combo) == pytest.approx(2 ** (1 / 3), abs=1e-15)
        lo, hi = block_distortion(space, part, basis, n_samples=25, seed=3)
        assert lo == pytest.approx(1.0, abs=1e-12)
        assert hi == pytest.approx(1.0, abs=1e-12)

    def test_perturbed_mode_distortion(self):
        basis = block_basis(self.space, self.part, perturb_seed=11)
        for e in basis:
            assert norm(e) == pytest.approx(1.0, abs=1e-12)
        lo, hi = block_distortion(self.space, self.part, basis, n_samples=100, seed=5)
        assert 1.0 - 1.0 / 8.0 < lo <= hi < 1.0 + 1.0 / 8.0

    def test_dimension_guard(self):
        with pytest.raises(InvalidInputError):
            block_basis(lp_space(3, 2), self.part)

    def test_oversized_noise_exhausts_retries(self):
        with pytest.raises(ResourceLimitError):
            block_basis(self.space, self.part, perturb_seed=1, noise_scale=5.0)


class TestTransformBound:
    def setup_method(self):
        self.fam = NormFamily.power(1, 0.5)
        self.part = block_partition(self.fam, 1.5, 3, 1.0)
        self.space = lp_space(3, self.part.horizon)

    def test_basis_functional_equality_case(self):
        f = Functional(self.space, self.space.basis_vector(1).coords)
        chk = block_transform_bound(self.space, self.fam, self.part, f, 1)
        assert chk.lhs == pytest.approx(1.0 / self.part.sums[0], abs=1e-15)
        assert chk.rhs == pytest.approx(chk.lhs, abs=1e-15)
        assert chk.constant == 1.0

    def test_orthogonal_functional_gives_zero(self):
        lo, hi = self.part.block(2)
        coords = np.zeros(self.space.dim)
        coords[hi] = 1.0  # outside block 2 (0-based hi is first column past it)
        f = Functional(self.space, coords)
        chk = block_transform_bound(self.space, self.fam, self.part, f, 2)
        assert chk.lhs == 0.0

    def test_random_functionals_within_bound(self):
        for seed in range(30):
            f = random_functional(self.space, seed)
            for row in range(1, self.part.n_blocks + 1):
                chk = block_transform_bound(self.space, self.fam, self.part, f, row)
                assert chk.lhs <= chk.rhs

    def test_perturbed_constant_two(self):
        basis = block_basis(self.space, self.part, perturb_seed=11)
        for seed in range(10):
            f = random_functional(self.space, seed)
            chk = block_transform_bound(
                self.space, self.fam, self.part, f, 1, basis=basis
            )
            assert chk.constant == 2.0
            assert chk.lhs <= chk.rhs

    def test_violation_raises(self):
        f = Functional(self.space, self.space.basis_vector(1).coords)
        with pytest.raises(BoundViolationError):
            block_transform_bound(
                self.space, self.fam, self.part, f, 1, constant=0.5
            )

    def test_weighted_average_dominates_minimum(self):
        # finite cluster-point surrogate: some column keeps the combined
        # pairing mass below the summed bounds
        fs = [random_functional(self.space, s) for s in (3, 4, 5)]
        W = block_weights(self.fam, self.part)
        pp = self.part.p_prime
        basis = block_basis(self.space, self.part)
        a = self.fam.values_upto(self.part.horizon)
        seq = ScalarSequence(
            np.array(
                [
                    sum(abs(pair(f, basis[m].scaled(a[m]))) ** pp for f in fs)
                    for m in range(self.part.horizon)
                ]
            )
        )
        for row in range(1, self.part.n_blocks + 1):
            _, low = min_on_support(W, seq, row)
            budget = sum(
                dual_norm(f) ** pp / self.part.sums[row - 1] for f in fs
            )
            assert low <= budget + 1e-12
