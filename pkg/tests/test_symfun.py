import math

import numpy as np
import pytest

from curvlab import symfun
from curvlab.errors import DomainError


class TestSigma:
    def test_order_zero_is_one(self):
        assert symfun.sigma(0, [3.0, -1.0, 0.5]) == 1.0

    def test_pairs_of_123(self):
        # subsets {12, 13, 23} -> 2 + 3 + 6
        assert symfun.sigma(2, [1.0, 2.0, 3.0]) == pytest.approx(11.0, rel=1e-14)

    def test_top_order_single_subset(self):
        assert symfun.sigma(3, [1.0, 1.0, 1.0]) == pytest.approx(1.0)

    def test_out_of_range_order(self):
        with pytest.raises(DomainError):
            symfun.sigma(4, [1.0, 2.0, 3.0])
        with pytest.raises(DomainError):
            symfun.sigma(-1, [1.0, 2.0])

    def test_matches_subset_sum_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            m = int(rng.integers(2, 7))
            lam = rng.normal(0.0, 1.5, m)
            scale_lam = np.abs(lam)
            for k in range(m + 1):
                fast = symfun.sigma(k, lam)
                slow = symfun.sigma_subset_sum(k, lam)
                scale = max(1.0, symfun.sigma(k, scale_lam))
                assert abs(fast - slow) <= 1e-12 * scale

    def test_permutation_symmetry(self):
        rng = np.random.default_rng(3)
        lam = rng.normal(size=6)
        for k in range(7):
            base = symfun.sigma(k, lam)
            for _ in range(5):
                assert symfun.sigma(k, rng.permutation(lam)) == pytest.approx(base, rel=1e-13, abs=1e-13)


class TestNormalizedH:
    def test_mean_of_torus_point(self):
        assert symfun.normalized_h(1, [2.0, 0.4]) == pytest.approx(1.2, rel=1e-14)

    def test_second_order(self):
        assert symfun.normalized_h(2, [1.0, 2.0, 3.0]) == pytest.approx(11.0 / 3.0, rel=1e-14)

    @pytest.mark.parametrize("c,m", [(0.5, 2), (2.0, 4), (1.3, 5)])
    def test_umbilical_top_power(self, c, m):
        assert symfun.normalized_h(m, [c] * m) == pytest.approx(c**m, rel=1e-13)


class TestRestrictedH:
    def test_order_zero(self):
        assert symfun.restricted_h(0, 1, [4.0, 5.0, 6.0]) == 1.0

    def test_drop_first(self):
        assert symfun.restricted_h(1, 0, [5.0, 1.0, 1.0]) == pytest.approx(1.0)

    def test_drop_last(self):
        # sigma_2(1, 2) = 2, C(2, 2) = 1
        assert symfun.restricted_h(2, 2, [1.0, 2.0, 3.0]) == pytest.approx(2.0)

    def test_index_out_of_range(self):
        with pytest.raises(DomainError):
            symfun.restricted_h(1, 3, [1.0, 2.0, 3.0])

    def test_table_agrees_with_scalar(self):
        rng = np.random.default_rng(11)
        lam = rng.normal(size=(4, 5))
        table = symfun.restricted_h_table(lam)
        for s in range(4):
            for j in range(5):
                for k in range(5):
                    assert table[s, j, k] == pytest.approx(
                        symfun.restricted_h(k, j, lam[s]), rel=1e-13, abs=1e-13
                    )


class TestNewtonSpectrum:
    def test_identity_at_order_zero(self):
        spec = symfun.newton_spectrum(0, [1.0, 2.0, 3.0])
        assert np.allclose(spec.eigenvalues, 1.0)

    def test_first_order(self):
        spec = symfun.newton_spectrum(1, [1.0, 2.0, 3.0])
        assert np.allclose(spec.eigenvalues, [5.0, 4.0, 3.0])

    def test_trace_identity(self):
        lam = [1.0, 2.0, 3.0]
        spec = symfun.newton_spectrum(1, lam)
        assert spec.trace == pytest.approx((3 - 1) * symfun.sigma(1, lam))

    def test_trace_identity_random(self):
        rng = np.random.default_rng(5)
        lam = rng.normal(size=7)
        m = 7
        for k in range(m):
            spec = symfun.newton_spectrum(k, lam)
            assert spec.trace == pytest.approx((m - k) * symfun.sigma(k, lam), rel=1e-12, abs=1e-12)


class TestNewtonMatrixOracle:
    def test_diag_123(self):
        t = symfun.newton_matrix_oracle(1, np.diag([1.0, 2.0, 3.0]))
        assert np.allclose(t, np.diag([5.0, 4.0, 3.0]), atol=1e-12)

    def test_identity_input(self):
        t = symfun.newton_matrix_oracle(1, np.eye(3))
        assert np.allclose(t, 2.0 * np.eye(3), atol=1e-12)

    def test_second_order_ones(self):
        t = symfun.newton_matrix_oracle(2, np.diag([1.0, 1.0, 1.0]))
        assert np.allclose(t, np.eye(3), atol=1e-12)

    def test_first_order_closed_form_general_matrix(self):
        # T_1 = tr(A) I - A holds for any A, diagonal or not.
        rng = np.random.default_rng(2)
        a = rng.normal(size=(4, 4))
        a = 0.5 * (a + a.T)
        t = symfun.newton_matrix_oracle(1, a)
        assert np.allclose(t, np.trace(a) * np.eye(4) - a, atol=1e-12)

    def test_matches_spectrum_on_diagonals(self):
        rng = np.random.default_rng(9)
        for m in (2, 3, 4, 5):
            lam = rng.normal(0.0, 1.2, size=m)
            for k in range(1, m):
                t = symfun.newton_matrix_oracle(k, np.diag(lam))
                expect = np.diag(symfun.newton_eigen_table(k, lam)[0])
                assert np.allclose(t, expect, atol=1e-10)

    def test_refuses_large_matrices(self):
        with pytest.raises(DomainError):
            symfun.newton_matrix_oracle(1, np.eye(7))


class TestMaclaurinGap:
    def test_umbilical_equality(self):
        for m in (2, 3, 5):
            lam = [1.7] * m
            for i in range(1, m):
                for j in range(i + 1, m + 1):
                    assert symfun.maclaurin_ratio_gap(i, j, lam) == pytest.approx(0.0, abs=1e-13)

    def test_123_gap(self):
        # H0/H1 = 1/2, H1/H2 = 6/11; gap = 6/11 - 1/2 = 1/22
        gap = symfun.maclaurin_ratio_gap(1, 2, [1.0, 2.0, 3.0])
        assert gap == pytest.approx(1.0 / 22.0, rel=1e-13)

    def test_nonnegative_on_positive_sweep(self):
        rng = np.random.default_rng(13)
        lam = rng.uniform(0.05, 3.0, size=(2000, 5))
        h = symfun.h_table(lam)
        for i in range(1, 5):
            for j in range(i + 1, 6):
                gaps = h[:, j - 1] / h[:, j] - h[:, i - 1] / h[:, i]
                scale = np.abs(h[:, j - 1] / h[:, j]) + np.abs(h[:, i - 1] / h[:, i])
                assert np.all(gaps >= -1e-12 * scale)

    def test_vanishing_h_reports_violation(self):
        with pytest.raises(DomainError):
            symfun.maclaurin_ratio_gap(1, 2, [1.0, -1.0])  # sigma_1 = 0 exactly


class TestRestrictedMaclaurinGap:
    def test_all_ones(self):
        # 2 * 1 * 1 - 1 * 1 * 1 = 1
        assert symfun.restricted_maclaurin_gap(1, 2, 0, [1.0, 1.0, 1.0]) == pytest.approx(1.0)

    def test_positive_on_garding_sweep(self):
        rng = np.random.default_rng(21)
        for m in (3, 4, 6):
            for p in (2, m - 1, m):
                lam = symfun.garding_sample(m, p, rng, size=300)
                h = symfun.h_table(lam)
                r = symfun.restricted_h_table(lam)
                for i in range(1, p):
                    for j in range(i + 1, p + 1):
                        for l in range(m):
                            gaps = j * h[:, i] * r[:, l, j - 1] - i * h[:, j] * r[:, l, i - 1]
                            assert np.all(gaps > 0.0)


class TestSplittingIdentity:
    def test_sigma_splitting(self):
        rng = np.random.default_rng(17)
        lam = rng.normal(0.0, 1.4, size=(500, 6))
        m = 6
        sig = symfun.sigma_table(lam)
        for l in range(m):
            rest = np.concatenate([lam[:, :l], lam[:, l + 1 :]], axis=1)
            sig_rest = symfun.sigma_table(rest)
            for i in range(1, m + 1):
                lhs = sig[:, i]
                rhs = lam[:, l] * sig_rest[:, i - 1] + (sig_rest[:, i] if i <= m - 1 else 0.0)
                scale = np.maximum(1.0, np.abs(lhs))
                assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale)

    def test_h_splitting(self):
        # H_i = (i/m) lam_l H_{i-1;l} + ((m-i)/m) H_{i;l}
        rng = np.random.default_rng(19)
        lam = rng.uniform(0.1, 2.0, size=(400, 5))
        m = 5
        h = symfun.h_table(lam)
        r = symfun.restricted_h_table(lam)
        for l in range(m):
            for i in range(1, m + 1):
                tail = ((m - i) / m) * r[:, l, i] if i <= m - 1 else 0.0
                rhs = (i / m) * lam[:, l] * r[:, l, i - 1] + tail
                scale = np.maximum(1.0, np.abs(h[:, i]))
                assert np.all(np.abs(h[:, i] - rhs) <= 1e-12 * scale)


class TestPositivityCascade:
    def test_cone_samples_have_positive_newton_spectra(self):
        rng = np.random.default_rng(23)
        for m, p in [(4, 4), (5, 3), (6, 6)]:
            lam = symfun.garding_sample(m, p, rng, size=200)
            h = symfun.h_table(lam)
            assert np.all(h[:, 1 : p + 1] > 0.0)
            r = symfun.restricted_h_table(lam)
            for k in range(1, p):
                assert np.all(symfun.newton_eigen_table(k, lam) > 0.0)
                assert np.all(r[:, :, k] > 0.0)


def test_binomial_coefficient_identity_exact():
    # (n-k) C(n-2, k-2) == (n-2) C(n-3, k-2) in integer arithmetic
    for n in range(3, 20):
        for k in range(2, n):
            assert (n - k) * math.comb(n - 2, k - 2) == (n - 2) * math.comb(n - 3, k - 2)


class TestGardingSample:
    def test_postcondition(self):
        rng = np.random.default_rng(0)
        for m, p in [(2, 1), (3, 3), (8, 5)]:
            lam = symfun.garding_sample(m, p, rng)
            assert symfun.in_garding_cone(lam, p)

    def test_deterministic_given_seed(self):
        a = symfun.garding_sample(5, 3, 42, size=10)
        b = symfun.garding_sample(5, 3, 42, size=10)
        assert np.array_equal(a, b)

    def test_mildly_negative_entry_accepted_for_p1(self):
        # (3, 2, -1) has H_1 = 4/3 > 0
        assert symfun.in_garding_cone([3.0, 2.0, -1.0], 1)
        assert not symfun.in_garding_cone([3.0, 2.0, -1.0], 3)

    def test_some_samples_have_negative_entries(self):
        lam = symfun.garding_sample(4, 1, 1234, size=400)
        assert np.any(lam < 0.0)
