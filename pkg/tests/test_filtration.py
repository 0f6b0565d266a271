"""
Unit tests for toric filtrations, weighted volumes, distances and DH measures
"""

import random
import pytest
from fractions import Fraction
from pathlib import Path

import sys
sys.path.append(str(Path(__file__).parent.parent / "src"))
from config.settings import DEFAULT_SEED
from extremal.affine import AffineFunction
from filtration.dh import dh_histogram
from filtration.metrics import d_v1, d_v1_detailed, quotient_distance
from filtration.volumes import (ToricFiltration, normalization_prefactor, weighted_volume_exact,
                                weighted_volume_lattice)
from geometry.polytope import box, standard_simplex
from geometry.triangulation import triangulate
from quadrature.polynomial import Polynomial, smooth_weight_from_table
from stability.pl_functions import PLConvexFunction
from utils.errors import LatticeTooLarge

F = Fraction


def _max_of(domain, *pieces):
    return PLConvexFunction.max_of_affine([AffineFunction(c, g) for c, g in pieces], domain)


class TestLatticeVolumes:
    """Test cases for exact and lattice weighted volumes"""

    def setup_method(self):
        self.interval = box([0], [1])
        self.square = box([-1, -1], [1, 1])
        self.simplex = standard_simplex(2)
        self.one1 = Polynomial.constant(1, 1)
        self.one2 = Polynomial.constant(2, 1)

    def test_interval_identity(self):
        """Test the closed-form lattice sum on [0, 1]"""
        f = _max_of(self.interval, (0, (1,)))
        for m in (1, 3, 10):
            value = weighted_volume_lattice(f, self.one1, self.interval, m, exact=True)
            assert value == F(m + 1, 2 * m)
            assert value - F(1, 2) == F(1, 2 * m)

    def test_square_hinge(self):
        """Test the hinge lattice sum on the square"""
        f = _max_of(self.square, (0, (0, 0)), (0, (1, 0)))
        for m in (2, 5):
            assert weighted_volume_lattice(f, self.one2, self.square, m, exact=True) == F((2 * m + 1) * (m + 1), 2 * m * m)
        assert weighted_volume_exact(f, self.one2, self.square, triangulate(self.square, 1)) == 1

    def test_square_diagonal_hinge(self):
        """Test the diagonal hinge lattice sum on the square"""
        f = _max_of(self.square, (0, (0, 0)), (0, (1, 1)))
        m = 6
        expected = F(4, 3) + F(2, m) + F(2, 3 * m * m)
        assert weighted_volume_lattice(f, self.one2, self.square, m, exact=True) == expected
        assert weighted_volume_lattice(f, self.one2, self.square, m) == pytest.approx(float(expected))

    def test_simplex_coordinate(self):
        """Test a coordinate function on the triangle"""
        f = _max_of(self.simplex, (0, (1, 0)))
        m = 7
        assert weighted_volume_lattice(f, self.one2, self.simplex, m, exact=True) == F((m + 1) * (m + 2), 6 * m * m)
        assert weighted_volume_exact(f, self.one2, self.simplex) == F(1, 6)

    def test_convergence_order(self):
        """Test error <= 3/m at m = 50, 100, 200 and error(200) <= 0.6 * error(100)"""
        examples = [
            (self.square, _max_of(self.square, (0, (0, 0)), (0, (1, 0)))),
            (self.square, _max_of(self.square, (0, (0, 0)), (0, (1, 1)))),
            (self.simplex, _max_of(self.simplex, (0, (1, 0)), (0, (0, 1)))),
        ]
        for P, f in examples:
            exact = float(weighted_volume_exact(f, self.one2, P))
            errors = {m: abs(weighted_volume_lattice(f, self.one2, P, m) - exact) for m in (50, 100, 200)}
            assert all(error <= 3 / m for m, error in errors.items())
            assert errors[200] <= 0.6 * errors[100]

    def test_normalized(self):
        """Test the normalization prefactor"""
        f = _max_of(self.square, (0, (0, 0)), (0, (1, 0)))
        assert normalization_prefactor(self.square, self.one2) == F(1, 8)
        assert weighted_volume_exact(f, self.one2, self.square, triangulate(self.square, 1), normalized=True) == F(1, 8)

    def test_rounding_lowers_sum(self):
        """Test the rounded successive minima"""
        f = _max_of(self.square, (0, (0, 0)), (0, (F(1, 2), 0)))
        plain = weighted_volume_lattice(f, self.one2, self.square, 3, exact=True)
        rounded = weighted_volume_lattice(f, self.one2, self.square, 3, exact=True, rounding=True)
        assert rounded < plain

    def test_lattice_too_large(self):
        """Test the lattice point limit"""
        f = _max_of(self.square, (0, (1, 0)))
        with pytest.raises(LatticeTooLarge):
            weighted_volume_lattice(f, self.one2, self.square, 10 ** 4)

    def test_exact_needs_polynomial(self):
        """Test exact sums with a smooth weight"""
        f = _max_of(self.square, (0, (1, 0)))
        w = smooth_weight_from_table("gaussian", [1.0, 0.0, 0.0], 2)
        with pytest.raises(ValueError):
            weighted_volume_lattice(f, w, self.square, 2, exact=True)


class TestToricFiltration:
    """Test cases for successive minima of the induced filtration"""

    def setup_method(self):
        self.square = box([-1, -1], [1, 1])
        self.f = _max_of(self.square, (0, (0, 0)), (0, (F(1, 2), 0)))

    def test_denominator(self):
        """Test the common denominator of the filtration"""
        filtration = ToricFiltration.from_function(self.f)
        assert filtration.denominator == 2
        assert filtration.is_integral()

    def test_successive_minima(self):
        """Test successive minima with and without rounding"""
        minima = dict(ToricFiltration.from_function(self.f).successive_minima(3))
        assert len(minima) == 49
        assert minima[(3, 0)] == F(3, 2)
        assert minima[(-3, 2)] == 0
        rounded = dict(ToricFiltration.from_function(self.f).successive_minima(3, rounding=True))
        assert rounded[(3, 0)] == 1


class TestDistances:
    """Test cases for d_{v,1} and the quotient by constant shifts"""

    def setup_method(self):
        self.line = box([-1], [1])
        self.square = box([-1, -1], [1, 1])
        self.one1 = Polynomial.constant(1, 1)
        self.one2 = Polynomial.constant(2, 1)
        self.rng = random.Random(DEFAULT_SEED)

    def _random_function(self):
        pieces = [(F(self.rng.randint(-4, 4), 2), (F(self.rng.randint(-2, 2)), F(self.rng.randint(-2, 2))))
                  for _ in range(self.rng.randint(1, 3))]
        return _max_of(self.square, *pieces)

    def test_hinge_distance(self):
        """Test d_v1 between a hinge and zero"""
        hinge = _max_of(self.line, (0, (0,)), (0, (1,)))
        zero = PLConvexFunction.zero(self.line)
        assert d_v1(hinge, zero, self.one1, self.line) == F(1, 2)
        assert d_v1(zero, hinge, self.one1, self.line) == F(1, 2)
        assert d_v1(hinge, hinge, self.one1, self.line) == 0

    def test_formulas_agree(self):
        """Test the min formula against the L1 formula"""
        for _ in range(20):
            f1, f2 = self._random_function(), self._random_function()
            result = d_v1_detailed(f1, f2, self.one2, self.square)
            assert result.consistent
            assert result.value >= 0

    def test_triangle_inequality(self):
        """Test the triangle inequality"""
        for _ in range(20):
            f1, f2, f3 = self._random_function(), self._random_function(), self._random_function()
            d12 = d_v1(f1, f2, self.one2, self.square)
            d23 = d_v1(f2, f3, self.one2, self.square)
            d13 = d_v1(f1, f3, self.one2, self.square)
            assert d13 <= d12 + d23

    def test_quotient_constant_shift(self):
        """Test the quotient of a constant shift"""
        f1 = _max_of(self.line, (0, (0,)), (0, (1,)))
        f2 = f1.plus_affine(AffineFunction(7, (0,)))
        result = quotient_distance(f1, f2, self.one1, self.line)
        assert result.shift == 7
        assert result.value == 0

    def test_quotient_hinge(self):
        """Test the quotient distance of a hinge"""
        zero = PLConvexFunction.zero(self.line)
        hinge = _max_of(self.line, (0, (0,)), (0, (1,)))
        result = quotient_distance(zero, hinge, self.one1, self.line)
        assert result.shift == 0
        assert result.value == F(1, 2)
        assert float(result) == 0.5


class TestDHHistogram:
    """Test cases for the Duistermaat-Heckman histogram"""

    def setup_method(self):
        self.square = box([-1, -1], [1, 1])
        self.one = Polynomial.constant(2, 1)

    def test_total_mass(self):
        """Test the total histogram mass"""
        f = _max_of(self.square, (0, (0, 0)), (0, (1, 0)))
        m = 10
        histogram = dh_histogram(f, self.one, self.square, bins=8, m=m)
        assert len(histogram.masses) == 8
        assert histogram.total == pytest.approx(4 + 4 / m + 1 / m ** 2)

    def test_first_moment(self):
        """Test the first moment of the histogram"""
        f = _max_of(self.square, (0, (0, 0)), (0, (1, 0)))
        histogram = dh_histogram(f, self.one, self.square, bins=20, m=50)
        assert histogram.first_moment == pytest.approx(1.0, abs=0.1)
        assert len(histogram.to_records()) == 20

    def test_constant_function(self):
        """Test a constant function"""
        histogram = dh_histogram(PLConvexFunction.zero(self.square), self.one, self.square, bins=5, m=4)
        assert len(histogram.masses) == 1
        assert histogram.total == pytest.approx(81 / 16)

    def test_invalid_bins(self):
        """Test invalid bin counts"""
        with pytest.raises(ValueError):
            dh_histogram(PLConvexFunction.zero(self.square), self.one, self.square, bins=0, m=4)

    def test_mass_error_bound(self):
        """Test |total mass - int_P v dy| <= 5/m on the example configurations"""
        simplex = standard_simplex(2)
        examples = [
            (self.square, _max_of(self.square, (0, (0, 0)), (0, (1, 0))), 4),
            (self.square, _max_of(self.square, (0, (0, 0)), (0, (1, 1))), 4),
            (simplex, _max_of(simplex, (0, (1, 0)), (0, (0, 1))), F(1, 2)),
        ]
        for P, f, volume in examples:
            for m in (10, 50, 100):
                histogram = dh_histogram(f, self.one, P, bins=10, m=m)
                assert abs(histogram.total - float(volume)) <= 5 / m

    def test_no_lattice_points(self):
        """Test the empty histogram when mP holds no lattice points"""
        P = box([F(1, 3)], [F(2, 3)])
        f = _max_of(P, (0, (1,)))
        histogram = dh_histogram(f, Polynomial.constant(1, 1), P, bins=4, m=1)
        assert histogram.total == 0
        assert len(histogram.masses) == 0
        assert histogram.to_records() == []
        assert histogram.first_moment == 0


if __name__ == "__main__":
    pytest.main([__file__])
