"""
Unit tests for polynomial weights and exact and approximate integration
"""

import math
import pytest
import numpy as np
from fractions import Fraction
from pathlib import Path

import sys
sys.path.append(str(Path(__file__).parent.parent / "src"))
from extremal.affine import AffineFunction
from geometry.polytope import box, standard_simplex
from geometry.triangulation import triangulate
from quadrature.integrate import (grundmann_moeller, integrate_monomial_simplex, integrate_pl_product,
                                  integrate_polynomial_boundary, integrate_polynomial_region, integrate_smooth,
                                  integrate_smooth_boundary, rule_degree, simplex_moments)
from quadrature.polynomial import Polynomial, SmoothWeight, smooth_weight_from_table, weight_from_dict
from stability.pl_functions import PLConvexFunction
from utils.errors import DegenerateSimplex, TriangulationTooCoarse

F = Fraction


class TestPolynomial:
    """Test cases for exact polynomial weights"""

    def test_arithmetic(self):
        """Test polynomial arithmetic"""
        y1 = Polynomial.variable(2, 0)
        y2 = Polynomial.variable(2, 1)
        p = (1 + y1) * (1 - y1) + 2 * y2
        assert p.evaluate((F(1, 2), F(1))) == F(3, 4) + 2
        assert p.degree == 2
        assert (p - p).is_zero()

    def test_partial_derivative(self):
        """Test partial derivatives of a polynomial"""
        y1, y2 = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
        p = y1 ** 2 * y2 + 3 * y2 + 5
        assert p.partial(0) == 2 * y1 * y2
        assert p.partial(1) == y1 ** 2 + 3
        assert Polynomial.constant(2, 7).partial(0).is_zero()

    def test_dict_round_trip(self):
        """Test the polynomial JSON round trip"""
        p = Polynomial(2, {(0, 0): F(1), (2, 1): F(-3, 4)})
        assert Polynomial.from_dict(p.to_dict()) == p

    def test_weight_from_dict(self):
        """Test reading polynomial and smooth weights"""
        w = weight_from_dict({"smooth": "gaussian", "params": [1.0, 0.0, 0.0]}, dim=2)
        assert isinstance(w, SmoothWeight)
        assert w.evaluate((0, 0)) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            weight_from_dict({"dim": 1, "terms": []}, dim=2)

    def test_unknown_smooth_weight(self):
        """Test an unknown smooth weight name"""
        with pytest.raises(ValueError):
            smooth_weight_from_table("cosine", [1.0], 1)


class TestExactIntegration:
    """Test cases for the Dirichlet-formula integrals"""

    def setup_method(self):
        self.triangle = [(F(0), F(0)), (F(1), F(0)), (F(0), F(1))]
        self.square = box([-1, -1], [1, 1])
        self.simplex = standard_simplex(2)
        self.interval = box([0], [1])

    def test_monomials_on_standard_triangle(self):
        """Test monomial integrals on the standard triangle"""
        assert integrate_monomial_simplex((0, 0), self.triangle) == F(1, 2)
        assert integrate_monomial_simplex((1, 0), self.triangle) == F(1, 6)
        assert integrate_monomial_simplex((2, 0), self.triangle) == F(1, 12)
        assert integrate_monomial_simplex((1, 1), self.triangle) == F(1, 24)

    def test_degenerate_simplex(self):
        """Test a degenerate simplex"""
        with pytest.raises(DegenerateSimplex):
            integrate_monomial_simplex((0, 0), [(0, 0), (1, 1), (2, 2)])

    def test_region_integral_independent_of_refinement(self):
        """Test region integrals across refinements"""
        g = Polynomial.variable(2, 0) ** 2
        for k in range(3):
            assert integrate_polynomial_region(g, triangulate(self.square, k)) == F(4, 3)

    def test_boundary_integrals(self):
        """Test boundary integrals against d(sigma)"""
        one = Polynomial.constant(2, 1)
        assert integrate_polynomial_boundary(one, self.square) == 8
        assert integrate_polynomial_boundary(one, self.simplex) == 3
        assert integrate_polynomial_boundary(Polynomial.variable(2, 0), self.simplex) == 1
        # unit atoms at the endpoints
        assert integrate_polynomial_boundary(Polynomial.constant(1, 1), self.interval) == 2
        assert integrate_polynomial_boundary(Polynomial.variable(1, 0), self.interval) == 1

    def test_hat_moments_sum_to_total(self):
        """Test that hat moments sum to the integral"""
        g = 1 + Polynomial.variable(2, 0) * Polynomial.variable(2, 1)
        total, moments = simplex_moments(g, self.triangle)
        assert sum(moments) == total
        assert simplex_moments(Polynomial.constant(2, 1), self.triangle)[1] == [F(1, 6)] * 3


class TestQuadrature:
    """Test cases for Grundmann-Moeller rules on smooth weights"""

    def setup_method(self):
        self.simplex = standard_simplex(2)
        self.square = box([-1, -1], [1, 1])

    def test_weights_sum(self):
        """Test the sum of quadrature weights"""
        for k in (1, 2, 3):
            weights, nodes = grundmann_moeller(k, 7)
            assert weights.sum() == pytest.approx(1 / math.factorial(k))
            assert np.allclose(nodes.sum(axis=1), 1.0)

    def test_rule_degree(self):
        """Test the rule degree"""
        assert rule_degree(4) == 5
        assert rule_degree(7) == 7

    def test_polynomial_exactness(self):
        """Test exactness on polynomials"""
        g = SmoothWeight(lambda pts: pts[:, 0] ** 4, 2, 5)
        assert integrate_smooth(g, self.simplex.base_triangulation) == pytest.approx(1 / 30, abs=1e-12)

    def test_gaussian_on_square(self):
        """Test a Gaussian integral on the square"""
        g = smooth_weight_from_table("gaussian", [0.5, 0.0, 0.0], 2)
        one_dimensional = math.sqrt(2 * math.pi) * math.erf(1 / math.sqrt(2))
        value = integrate_smooth(g, triangulate(self.square, 2))
        assert value == pytest.approx(one_dimensional ** 2, abs=1e-6)

    def test_smooth_boundary_matches_exact(self):
        """Test smooth boundary integrals"""
        g = SmoothWeight(lambda pts: 1 + pts[:, 0] ** 2, 2, 3)
        exact = integrate_polynomial_boundary(1 + Polynomial.variable(2, 0) ** 2, self.square)
        assert integrate_smooth_boundary(g, self.square) == pytest.approx(float(exact), abs=1e-12)


class TestPLProducts:
    """Test cases for integrals of PL functions against weights"""

    def setup_method(self):
        self.square = box([-1, -1], [1, 1])
        self.hinge = PLConvexFunction.max_of_affine([AffineFunction(0, (0, 0)), AffineFunction(0, (1, 0))],
                                                    self.square)
        self.one = Polynomial.constant(2, 1)

    def test_region_and_boundary(self):
        """Test PL products over the region and the boundary"""
        T = triangulate(self.square, 1)
        assert integrate_pl_product(self.hinge, self.one, T) == 1
        assert integrate_pl_product(self.hinge, self.one, T, boundary=True) == 3

    def test_coarse_triangulation(self):
        """Test a triangulation too coarse for f"""
        with pytest.raises(TriangulationTooCoarse):
            integrate_pl_product(self.hinge, self.one, triangulate(self.square, 0))

    def test_smooth_weight_close_to_exact(self):
        """Test smooth PL products against the exact path"""
        w = SmoothWeight(lambda pts: 1 + pts[:, 1] ** 2, 2, 5)
        exact = integrate_pl_product(self.hinge, 1 + Polynomial.variable(2, 1) ** 2, triangulate(self.square, 1))
        approx = integrate_pl_product(self.hinge, w, triangulate(self.square, 1))
        assert approx == pytest.approx(float(exact), abs=1e-10)


if __name__ == "__main__":
    pytest.main([__file__])
