import numpy as np
import pytest

from curvlab import radial
from curvlab.errors import ConstructionError


class TestExpressions:
    def test_power_with_caret(self):
        phi = radial.from_expression("r^2")
        r = np.linspace(0.5, 3.0, 7)
        assert np.allclose(phi(r), r**2)
        assert np.allclose(phi.derivative(r), 2.0 * r, atol=1e-7)

    def test_polynomial_and_exp(self):
        phi = radial.from_expression("2*r + exp(-r) - 1")
        r = np.array([0.0, 1.0, 2.0])
        assert np.allclose(phi(r), 2.0 * r + np.exp(-r) - 1.0)

    def test_min_max(self):
        phi = radial.from_expression("min(r, 2) + max(r - 1, 0)")
        assert phi(0.5) == pytest.approx(0.5)
        assert phi(3.0) == pytest.approx(4.0)

    def test_constant_broadcasts(self):
        phi = radial.from_expression("3")
        out = phi(np.zeros(5))
        assert out.shape == (5,)
        assert np.all(out == 3.0)

    def test_pi_constant(self):
        phi = radial.from_expression("pi*r")
        assert phi(2.0) == pytest.approx(2.0 * np.pi)

    @pytest.mark.parametrize("bad", [
        "__import__('os')",
        "r.denominator",
        "lambda x: x",
        "open('x')",
        "foo(r)",
        "r @ r",
        "(1).bit_length()",
        "",
    ])
    def test_rejects_disallowed_syntax(self, bad):
        with pytest.raises(ConstructionError):
            radial.from_expression(bad)

    def test_keyword_arguments_rejected(self):
        with pytest.raises(ConstructionError):
            radial.from_expression("min(r, r=2)")


class TestRadialFunction:
    def test_monomial_analytic_derivative(self):
        phi = radial.monomial(3, coeff=2.0)
        r = np.linspace(0.2, 2.0, 5)
        assert np.allclose(phi.derivative(r), 6.0 * r**2, rtol=1e-14)

    def test_fd_derivative_second_order(self):
        phi = radial.RadialFunction(np.sin)
        r = np.linspace(0.0, 3.0, 9)
        assert np.allclose(phi.derivative(r), np.cos(r), atol=1e-9)

    def test_monotonicity_validation(self):
        grid = np.linspace(0.5, 3.0, 50)
        inc = radial.from_expression("r^2", monotonicity="increasing")
        ok, margin = inc.validate_monotonicity(grid)
        assert ok and margin > 0.0
        wrong = radial.from_expression("r^2", monotonicity="decreasing")
        ok, margin = wrong.validate_monotonicity(grid)
        assert not ok and margin < 0.0

    def test_constant_is_weakly_monotone(self):
        ok, margin = radial.constant(2.0).validate_monotonicity(np.linspace(0, 1, 10))
        assert ok and margin == 0.0

    def test_bad_monotonicity_tag(self):
        with pytest.raises(ConstructionError):
            radial.RadialFunction(np.exp, monotonicity="wiggly")


class TestWeightFamily:
    def test_validate_and_differentiate(self):
        fam = radial.WeightFamily(
            b=(radial.constant(1.0), radial.from_expression("r", monotonicity="increasing")),
            eta=radial.from_expression("1/r", monotonicity="decreasing"),
            phi=radial.monomial(2),
        )
        grid = np.linspace(0.5, 2.5, 40)
        report = fam.validate(grid)
        assert all(ok for ok, _ in report.values())
        assert fam.check_differentiable(grid)
