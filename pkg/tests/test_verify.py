import math

import numpy as np
import pytest

from curvlab import ambient, radial, surfaces, symfun, verify
from curvlab.errors import DomainError, HypothesisViolation


@pytest.fixture(scope="module")
def e3():
    return ambient.make_space("euclidean", n=3)


@pytest.fixture(scope="module")
def e4():
    return ambient.make_space("euclidean", n=4)


@pytest.fixture(scope="module")
def schw3():
    return ambient.make_space("schwarzschild", n=3, mass=1.0)


@pytest.fixture(scope="module")
def schw4():
    return ambient.make_space("schwarzschild", n=4, mass=1.0)


def sphere(space, radius=1.0, offset=0.0, res=(32, 64)):
    return surfaces.build_surface(
        surfaces.SurfaceSpec("sphere", {"radius": radius, "offset": offset}, res), space)


def torus(res, source="auto"):
    e3 = ambient.make_space("euclidean", n=3)
    return surfaces.build_surface(
        surfaces.SurfaceSpec("torus3", {"R1": 2.0, "R2": 0.5}, res, source), e3)


class TestClassicalIdentity:
    def test_unit_sphere(self, e3):
        res = verify.classical_hm_residual(sphere(e3), 0)
        assert abs(res.lhs - 4.0 * math.pi) <= 1e-10
        assert abs(res.relative) <= 1e-10

    @pytest.mark.parametrize("j", [0, 1])
    def test_offset_sphere_r3(self, e3, j):
        res = verify.classical_hm_residual(sphere(e3, offset=0.3), j)
        assert abs(res.relative) <= 1e-8

    @pytest.mark.parametrize("j", [0, 1, 2])
    def test_offset_sphere_r4(self, e4, j):
        cloud = sphere(e4, offset=0.3, res=(16, 16, 32))
        res = verify.classical_hm_residual(cloud, j)
        assert abs(res.relative) <= 1e-8

    def test_torus_engine_with_convergence(self):
        coarse = verify.classical_hm_residual(torus((128, 128), "engine"), 1)
        fine = verify.classical_hm_residual(torus((256, 256), "engine"), 1)
        assert abs(fine.relative) <= 1e-6
        assert verify.convergence_order(coarse, fine) >= 2.0

    def test_rejects_non_euclidean(self, schw3):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("slice", {"r0": 2.0}, (16, 32)), schw3)
        with pytest.raises(DomainError):
            verify.classical_hm_residual(cloud, 0)


class TestWeightedIdentity:
    @pytest.mark.parametrize("k", [1, 2])
    def test_slice_schw3_exact(self, schw3, k):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("slice", {"r0": 2.0}, (16, 32)), schw3)
        res = verify.weighted_hm_residual(cloud, schw3, k, radial.monomial(2))
        assert abs(res.relative) <= 1e-12

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_slice_schw4_exact(self, schw4, k):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("slice", {"r0": 2.0}, (12, 12, 24)), schw4)
        res = verify.weighted_hm_residual(cloud, schw4, k, radial.monomial(2))
        assert abs(res.relative) <= 1e-12

    def test_sphere_phi_r2(self, e3):
        res = verify.weighted_hm_residual(sphere(e3), e3, 1, radial.monomial(2))
        assert abs(res.relative) <= 1e-9

    @pytest.mark.parametrize("k", [1, 2])
    def test_torus_engine(self, e3, k):
        cloud = torus((256, 256), "engine")
        res = verify.weighted_hm_residual(cloud, e3, k, radial.monomial(2))
        assert abs(res.relative) <= 1e-6

    @pytest.mark.parametrize("k", [1, 2])
    def test_torus_engine_convergence(self, e3, k):
        coarse = verify.weighted_hm_residual(torus((128, 128), "engine"), e3, k, radial.monomial(2))
        fine = verify.weighted_hm_residual(torus((256, 256), "engine"), e3, k, radial.monomial(2))
        assert verify.convergence_order(coarse, fine) >= 2.0

    def test_k1_with_unit_weight_is_unweighted_identity(self, e3, schw3):
        one = radial.constant(1.0)
        for cloud, space in [
            (sphere(e3), e3),
            (torus((64, 64)), e3),
            (surfaces.build_surface(surfaces.SurfaceSpec("slice", {"r0": 3.0}, (16, 32)), schw3), schw3),
        ]:
            res = verify.weighted_hm_residual(cloud, space, 1, one)
            f = space.dh(cloud.r)
            h1 = symfun.h_table(cloud.lambdas)[:, 1]
            direct = cloud.integrate(f - h1 * cloud.support)
            assert res.lhs == pytest.approx(direct, abs=1e-12 * max(1.0, abs(direct)))
            assert abs(res.relative) <= 1e-10

    def test_order_out_of_range(self, e3):
        with pytest.raises(DomainError):
            verify.weighted_hm_residual(sphere(e3), e3, 3, radial.monomial(2))


class TestDivergenceTheorem:
    def test_slice_exact(self, schw3):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("slice", {"r0": 2.0}, (16, 32)), schw3)
        res = verify.divergence_theorem_check(cloud, schw3, 2, radial.monomial(2))
        assert abs(res.relative) <= 1e-12

    @pytest.mark.parametrize("k", [1, 2])
    def test_torus_vanishes(self, e3, k):
        cloud = torus((256, 256), "engine")
        res = verify.divergence_theorem_check(cloud, e3, k, radial.monomial(2))
        assert abs(res.relative) <= 1e-6

    @pytest.mark.parametrize("k", [1, 2])
    def test_agrees_with_weighted_residual(self, e3, k):
        # same data, regrouped; agreement up to floating-point re-association
        cloud = torus((128, 128), "engine")
        phi = radial.monomial(2)
        w = verify.weighted_hm_residual(cloud, e3, k, phi)
        d = verify.divergence_theorem_check(cloud, e3, k, phi)
        scale = max(abs(w.residual), cloud.area)
        assert abs(d.residual / (k * math.comb(2, k)) - w.residual) <= 1e-12 * scale


class TestDivTXi:
    def test_order_one_is_zero(self, schw3):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("slice", {"r0": 2.0}, (16, 32)), schw3)
        assert np.all(verify.div_t_xi(cloud, schw3, 1) == 0.0)

    def test_binomial_bridging(self):
        # (n-k)/(n-2) sigma_{k-2;j} equals C(n-3, k-2) H_{k-2;j}
        rng = np.random.default_rng(4)
        for n in (4, 5, 6):
            m = n - 1
            lam = rng.normal(0.0, 1.3, size=(50, m))
            restricted = symfun.restricted_h_table(lam)
            for k in range(2, n):
                h_form = math.comb(n - 3, k - 2) * restricted[:, :, k - 2]
                sigma_form = np.empty_like(h_form)
                for j in range(m):
                    keep = np.concatenate([lam[:, :j], lam[:, j + 1:]], axis=1)
                    sigma_form[:, j] = symfun.sigma_table(keep)[:, k - 2]
                sigma_form *= (n - k) / (n - 2)
                assert np.allclose(h_form, sigma_form, rtol=1e-12, atol=1e-12)


class TestXiRicSign:
    def test_schwarzschild_radial_graph(self, schw3):
        rho = lambda ang: 2.0 * (1.0 + 0.1 * np.cos(ang[0]))
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("radial_graph", {"rho": rho, "n": 3}, (32, 64)), schw3)
        check = verify.xi_ric_sign_check(cloud, schw3)
        assert check.passed
        assert check.min_margin >= -1e-12

    def test_schwarzschild_slice_zero(self, schw3):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("slice", {"r0": 2.0}, (16, 32)), schw3)
        check = verify.xi_ric_sign_check(cloud, schw3)
        assert check.passed
        assert check.min_margin == 0.0

    def test_euclidean_skipped_by_hypotheses(self, e3):
        cloud = sphere(e3)
        with pytest.raises(HypothesisViolation):
            verify.xi_ric_sign_check(cloud, e3)
        # values are identically zero regardless (flat space)
        check = verify.xi_ric_sign_check(cloud, e3, require_hypotheses=False)
        assert check.min_margin == 0.0 and check.passed

    def test_torus_not_star_shaped(self, e3):
        with pytest.raises(HypothesisViolation):
            verify.xi_ric_sign_check(torus((32, 32)), e3)


class TestBrendleGap:
    def test_centered_sphere_equality(self, e3):
        out = verify.brendle_gap(sphere(e3, radius=1.5), e3)
        assert abs(out.gap) <= 1e-8 * out.area
        assert out.equality

    def test_schwarzschild_slice_equality(self, schw3):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("slice", {"r0": 2.5}, (16, 32)), schw3)
        out = verify.brendle_gap(cloud, schw3)
        assert abs(out.gap) <= 1e-8 * out.area
        assert out.equality

    def test_torus_strict_inequality(self, e3):
        out = verify.brendle_gap(torus((128, 128)), e3)
        assert out.gap > 10.0 * out.tol * out.area
        assert not out.equality

    def test_mean_convexity_required(self, e3):
        # R2 > R1/2 makes H_1 < 0 on the inner circle
        fat = surfaces.build_surface(
            surfaces.SurfaceSpec("torus3", {"R1": 2.0, "R2": 1.2}, (32, 32)), e3)
        with pytest.raises(HypothesisViolation):
            verify.brendle_gap(fat, e3)
