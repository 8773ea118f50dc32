"""Archimedean construction and copula-axiom validation tests."""

import math

import numpy as np
import pytest

from steff2d.copula import Generator, InvalidGeneratorError, archimedean, validate_copula


class TestArchimedean:
    def test_log_generator_reproduces_product(self):
        A = archimedean("-log(t)")
        assert A(0.5, 0.5) == pytest.approx(0.25, abs=1e-12)
        ts = np.linspace(0.0, 1.0, 101)
        grid = A(ts[:, None], ts[None, :])
        assert np.max(np.abs(grid - ts[:, None] * ts[None, :])) <= 1e-12

    def test_clayton_theta_one(self):
        # closed-form inverse 1/(1+s) gives A(x,y) = xy/(x+y-xy)
        A = archimedean("1/t - 1")
        assert A(0.5, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert A(0.4, 0.7) == pytest.approx(0.28 / (0.4 + 0.7 - 0.28), abs=1e-12)

    def test_unit_argument_is_identity(self):
        for phi in ("-log(t)", "1/t - 1", "(1-t)^2"):
            A = archimedean(phi)
            assert A(0.3, 1.0) == pytest.approx(0.3, abs=1e-12)
            assert A(1.0, 0.8) == pytest.approx(0.8, abs=1e-12)

    def test_finite_generator_clamps_to_lower_frechet(self):
        # phi(t) = 1 - t has phi(0+) = 1; the pseudo-inverse clamp gives
        # A(x, y) = max(x + y - 1, 0)
        A = archimedean("1 - t")
        assert A(0.3, 0.4) == pytest.approx(0.0, abs=1e-12)
        assert A(0.8, 0.7) == pytest.approx(0.5, abs=1e-12)

    def test_pseudo_inverse_consistency(self):
        gen = Generator.from_expression("-log(t)")
        ts = np.linspace(0.01, 1.0, 100)
        vals = np.array([gen.inverse(float(gen.phi(t))) for t in ts])
        assert np.max(np.abs(vals - ts)) <= 1e-12

    @pytest.mark.parametrize("phi", ["-log(t)", "1/t - 1", "(-log(t))^2", "1 - t"])
    def test_outputs_validate_as_copulas(self, phi):
        rep = validate_copula(archimedean(phi), grid=64, tol=1e-9)
        assert rep.passed, (phi, rep)

    def test_generator_diagnostics(self):
        gen = Generator.from_expression("-log(t)")
        assert math.isinf(gen.phi_at_zero)
        assert gen.strictly_decreasing and gen.convex
        gen2 = Generator.from_expression("1 - t")
        assert gen2.phi_at_zero == pytest.approx(1.0)

    @pytest.mark.parametrize("phi", ["t", "log(t)", "t - 1", "sqrt(1-t)*0 + t^2 - t"])
    def test_invalid_generators_rejected(self, phi):
        with pytest.raises(InvalidGeneratorError):
            archimedean(phi)


class TestValidateCopula:
    def test_product_passes(self):
        assert validate_copula("x*y").passed

    def test_upper_frechet_passes(self):
        rep = validate_copula("min(x, y)")
        assert rep.passed
        assert rep.min_cell_measure >= -1e-9

    def test_sum_fails_with_boundary_witness(self):
        rep = validate_copula("x + y")
        assert not rep.passed
        assert rep.boundary_max_error == pytest.approx(1.0)
        assert rep.boundary_witness_condition in ("C(x,0)=0", "C(0,y)=0")

    def test_non_two_increasing_candidate_fails(self):
        # boundary-correct but with negative rectangle measures
        rep = validate_copula("x*y + 0.5*x*(1-x)*y*(1-y)*(x-y)*20")
        assert rep.min_cell_measure < -1e-9 or rep.boundary_max_error > 1e-9
        assert not rep.passed

    def test_report_shape(self):
        rep = validate_copula("x*y", grid=16, tol=1e-10)
        assert rep.grid == 16
        assert rep.tol == 1e-10
        d = rep.to_dict()
        assert set(d) >= {"boundary_max_error", "min_cell_measure", "pass"}
