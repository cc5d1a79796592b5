import numpy as np
import pytest

from curvlab import ambient, radial, rigidity, surfaces, symfun
from curvlab.errors import ConstructionError, HypothesisViolation


@pytest.fixture(scope="module")
def e3():
    return ambient.make_space("euclidean", n=3)


@pytest.fixture(scope="module")
def e4():
    return ambient.make_space("euclidean", n=4)


@pytest.fixture(scope="module")
def schw3():
    return ambient.make_space("schwarzschild", n=3, mass=1.0)


def sphere(space, radius=1.0, offset=0.0, res=None):
    if res is None:
        res = (32, 64) if space.n == 3 else (16, 16, 32)
    return surfaces.build_surface(
        surfaces.SurfaceSpec("sphere", {"radius": radius, "offset": offset}, res), space)


def torus3_h1_profile(r1=2.0, r2=0.5):
    # H_1 of the circular torus as a function of the radius, increasing
    def fn(r):
        c = (np.asarray(r, dtype=float) ** 2 - r1**2 - r2**2) / (2.0 * r1 * r2)
        return 0.5 * (1.0 / r2 + c / (r1 + r2 * c))

    return radial.RadialFunction(fn, name="torus_h1_of_r", monotonicity="increasing")


class TestRadialCondition:
    def test_sphere_mean_curvature(self, e3):
        res = rigidity.radial_condition_residual(
            sphere(e3, radius=2.0), [radial.constant(1.0)], [], radial.constant(0.5))
        assert res.sup_residual == 0.0
        assert res.sup_normalized == 0.0

    def test_schwarzschild_slice_higher_order(self, schw3):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("slice", {"r0": 2.0}, (16, 32)), schw3)
        ratio = schw3.dh(2.0) / schw3.h(2.0)
        res = rigidity.radial_condition_residual(
            cloud, [None, radial.constant(1.0)], [], radial.constant(ratio**2), k=2)
        assert res.sup_residual <= 1e-15

    def test_mixed_b_and_c_terms_on_sphere(self, e3):
        # H_1 + H_1 H_0 = 2/R for the round sphere
        cloud = sphere(e3, radius=2.0)
        res = rigidity.radial_condition_residual(
            cloud, [radial.constant(1.0)], [radial.constant(1.0)], radial.constant(1.0))
        assert res.sup_residual <= 1e-15

    def test_torus_satisfies_increasing_eta_condition(self, e3):
        # the thin torus satisfies H_1 = eta(r) with eta *increasing*: a
        # non-umbilical surface showing the monotonicity assumption matters
        tor = surfaces.build_surface(
            surfaces.SurfaceSpec("torus3", {"R1": 2.0, "R2": 0.5}, (128, 64)), e3)
        eta = torus3_h1_profile()
        res = rigidity.radial_condition_residual(tor, [radial.constant(1.0)], [], eta)
        assert res.sup_residual <= 1e-12
        ok, margin = eta.validate_monotonicity(np.linspace(1.5, 2.5, 200))
        assert ok and margin > 0.0
        assert surfaces.umbilic_defect(tor) > 1e-7

    def test_eta_must_be_positive(self, e3):
        with pytest.raises(HypothesisViolation):
            rigidity.radial_condition_residual(
                sphere(e3), [radial.constant(1.0)], [], radial.constant(-1.0))

    def test_convexity_required(self, e3):
        fat = surfaces.build_surface(
            surfaces.SurfaceSpec("torus3", {"R1": 2.0, "R2": 1.2}, (32, 32)), e3)
        with pytest.raises(HypothesisViolation):
            rigidity.radial_condition_residual(fat, [radial.constant(1.0)], [], radial.constant(1.0))


class TestRatioCondition:
    def test_sphere(self, e3):
        res = rigidity.ratio_condition_residual(
            sphere(e3, radius=2.0), {1: radial.constant(1.0)}, {2: radial.constant(2.0)})
        assert res.sup_residual <= 1e-15

    def test_slice_matched_constants(self, schw3):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("slice", {"r0": 2.0}, (16, 32)), schw3)
        ratio = schw3.dh(2.0) / schw3.h(2.0)
        res = rigidity.ratio_condition_residual(
            cloud, {1: radial.constant(ratio)}, {2: radial.constant(1.0)})
        assert res.sup_residual <= 1e-15

    def test_profile_form(self, e3):
        cloud = sphere(e3, radius=2.0)
        res = rigidity.ratio_profile_residual(cloud, 2, 1, radial.constant(0.5))
        assert res.sup_residual <= 1e-15

    def test_order_separation_enforced(self, e3):
        with pytest.raises(Exception):
            rigidity.ratio_condition_residual(
                sphere(e3), {2: radial.constant(1.0)}, {2: radial.constant(1.0)})

    def test_torus4_ratio_is_radial_and_increasing(self, e4):
        spec = surfaces.SurfaceSpec("torus4", {"R1": 2.0, "R2": 0.5}, (64, 24, 24))
        cloud = surfaces.build_surface(spec, e4)
        h = symfun.h_table(cloud.lambdas)
        ratio = h[:, 2] / h[:, 1]
        dep = rigidity.radial_dependence(cloud, ratio, rel_tol=1e-6)
        assert dep.radial
        prof = surfaces.torus_profiles(spec, e4)
        assert prof.h2_over_h1_increasing


class TestSolitonSpec:
    def test_weights_must_sum_to_one(self):
        spec = rigidity.SolitonSpec({(0, 1): 0.5, (1, 2): 0.25})
        with pytest.raises(ConstructionError):
            spec.validate(4)

    def test_negative_weight_rejected(self):
        spec = rigidity.SolitonSpec({(0, 1): 1.5, (1, 2): -0.5})
        with pytest.raises(ConstructionError):
            spec.validate(4)

    def test_invalid_pair(self):
        with pytest.raises(ConstructionError):
            rigidity.SolitonSpec({(2, 1): 1.0})

    def test_k_is_largest_active_order(self):
        spec = rigidity.SolitonSpec({(0, 1): 0.5, (1, 3): 0.5})
        assert spec.k == 3

    def test_uniform_mix(self):
        spec = rigidity.SolitonSpec.uniform_mix(3)
        assert len(spec.weights) == 6
        spec.validate(1)


class TestSolitonResidual:
    @pytest.mark.parametrize("make_spec", [
        lambda: rigidity.SolitonSpec.single_pair(0, 1),
        lambda: rigidity.SolitonSpec.single_pair(1, 3),
        lambda: rigidity.SolitonSpec.uniform_mix(3),
    ])
    def test_centered_sphere_r4(self, e4, make_spec):
        out = rigidity.soliton_residual(sphere(e4), make_spec())
        assert out.mu == pytest.approx(1.0, abs=1e-12)
        assert out.sup_residual <= 1e-12

    def test_mu_scale_invariance(self, e4):
        for radius in (0.5, 1.0, 3.0):
            out = rigidity.soliton_residual(
                sphere(e4, radius=radius), rigidity.SolitonSpec.single_pair(0, 2))
            assert out.mu == pytest.approx(1.0, abs=1e-12)

    def test_translated_sphere_cannot_be_soliton(self, e3):
        out = rigidity.soliton_residual(
            sphere(e3, offset=0.3), rigidity.SolitonSpec.single_pair(0, 1))
        # speed is constant 1 but support is 1 + 0.3 cos; no mu fits
        assert out.sup_residual >= 0.25

    def test_fixed_mu_respected(self, e4):
        out = rigidity.soliton_residual(
            sphere(e4, radius=2.0), rigidity.SolitonSpec.single_pair(0, 1, mu=1.0))
        assert not out.mu_fitted
        # S = 2 while p = 2: residual zero even with pinned mu at R = 2...
        assert out.sup_residual <= 1e-12
        pinned = rigidity.soliton_residual(
            sphere(e4, radius=2.0), rigidity.SolitonSpec.single_pair(0, 1, mu=2.0))
        assert pinned.sup_residual == pytest.approx(2.0, abs=1e-12)

    def test_ellipsoid_not_a_soliton(self, e3):
        cloud = surfaces.build_surface(
            surfaces.SurfaceSpec("ellipsoid", {"semi_axes": (1.0, 1.0, 1.2)}, (48, 48)), e3)
        out = rigidity.soliton_residual(cloud, rigidity.SolitonSpec.single_pair(0, 1))
        assert out.sup_residual > 10.0 * 1e-6

    def test_convexity_violation_reported(self, e3):
        fat = surfaces.build_surface(
            surfaces.SurfaceSpec("torus3", {"R1": 2.0, "R2": 1.2}, (32, 32)), e3)
        with pytest.raises(HypothesisViolation):
            rigidity.soliton_residual(fat, rigidity.SolitonSpec.single_pair(0, 1))


class TestProofChain:
    def test_sphere_equalities(self, e4):
        for spec in (rigidity.SolitonSpec.single_pair(1, 3),
                     rigidity.SolitonSpec.uniform_mix(3)):
            records = rigidity.soliton_proof_chain(sphere(e4), spec)
            assert all(rec.passed for rec in records)
            assert all(abs(rec.min_slack) <= 1e-10 for rec in records)

    def test_k1_branch(self, e4):
        records = rigidity.soliton_proof_chain(sphere(e4), rigidity.SolitonSpec.single_pair(0, 1))
        names = [rec.name for rec in records]
        assert "ratio_bound[h2/h1<=h1/h0]" in names
        assert all(rec.passed for rec in records)

    def test_bracket_on_garding_sweep(self):
        rng = np.random.default_rng(31)
        pairs = [(0, 1), (0, 2), (1, 3), (2, 3)]
        lam = symfun.garding_sample(5, 5, rng, size=3000)
        h = symfun.h_table(lam)
        slacks = rigidity.bracket_inequality_slacks(lam, pairs)
        for (i, j), (upper, lower) in slacks.items():
            scale = np.abs(h[:, j - 1] / h[:, j]) + np.abs(h[:, 0] / h[:, 1])
            assert np.all(upper >= -1e-12 * scale)
            assert np.all(lower >= -1e-12 * scale)

    def test_bracket_on_convex_torus_band(self, e3):
        # samples of the torus where H_2 > 0 (the outer band)
        tor = surfaces.build_surface(
            surfaces.SurfaceSpec("torus3", {"R1": 2.0, "R2": 0.5}, (128, 32)), e3)
        h = symfun.h_table(tor.lambdas)
        lam = tor.lambdas[h[:, 2] > 1e-6]
        slacks = rigidity.bracket_inequality_slacks(lam, [(0, 1), (0, 2), (1, 2)])
        for upper, lower in slacks.values():
            assert np.all(upper >= -1e-12)
            assert np.all(lower >= -1e-12)

    def test_bracket_requires_convexity(self):
        with pytest.raises(HypothesisViolation):
            rigidity.bracket_inequality_slacks(np.array([[1.0, -2.0]]), [(0, 1)])
