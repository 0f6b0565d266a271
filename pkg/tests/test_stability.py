"""
Unit tests for PL convex functions, the weighted functional and the destabilizer LP
"""

import random
import pytest
from fractions import Fraction
from itertools import product
from pathlib import Path

import sys
sys.path.append(str(Path(__file__).parent.parent / "src"))
from config.settings import DEFAULT_SEED, ONE_SIDED_CAVEAT
from extremal.affine import AffineFunction
from extremal.solver import c_constant, solve_extremal
from geometry.polytope import box, simplex_volume, standard_simplex
from geometry.triangulation import triangulate
from optimization.lp import LPStatus
from quadrature.polynomial import Polynomial, smooth_weight_from_table
from stability.destabilizer import StabilityReport, check_stability, search_destabilizer
from stability.functional import discrete_MA, evaluate_L, normalize, weighted_futaki
from stability.pl_functions import PLConvexFunction, adapted_triangulation, pl_min
from utils.errors import PointNotInterior

F = Fraction


class _Config:
    """Minimal stand-in for the attributes check_stability reads"""

    def __init__(self, refinement=1, y0=None, trend=True):
        self.refinement = refinement
        self.y0 = y0
        self.trend = trend


class TestPLConvexFunction:
    """Test cases for the two PL representations"""

    def setup_method(self):
        self.square = box([-1, -1], [1, 1])
        self.hinge = PLConvexFunction.max_of_affine([AffineFunction(0, (0, 0)), AffineFunction(0, (1, 0))],
                                                    self.square)

    def test_evaluate(self):
        """Test evaluating a max-of-affine function"""
        assert self.hinge((F(1, 2), 0)) == F(1, 2)
        assert self.hinge((F(-1, 2), 1)) == 0

    def test_vertex_values_agree(self):
        """Test vertex values against max-of-affine"""
        g = self.hinge.vertex_values_on(triangulate(self.square, 1))
        assert g.is_convex()
        assert g((F(1, 3), F(1, 5))) == F(1, 3)

    def test_concave_values_flagged(self):
        """Test convexity violations"""
        T = triangulate(self.square, 1)
        g = PLConvexFunction.from_vertex_values(T, [-p[0] ** 2 for p in T.points])
        assert not g.is_convex()
        assert g.convexity_violations()

    def test_cells(self):
        """Test linearity cells"""
        cells = self.hinge.cells()
        assert len(cells) == 2
        assert sorted(cell.volume for _, cell in cells) == [2, 2]

    def test_cells_with_repeated_pieces(self):
        """Test that repeated and parallel pieces give one cell each"""
        doubled = PLConvexFunction.max_of_affine([AffineFunction(0, (0, 0)), AffineFunction(0, (1, 0)),
                                                  AffineFunction(0, (1, 0)), AffineFunction(-1, (0, 0))],
                                                 self.square)
        assert sorted(cell.volume for _, cell in doubled.cells()) == [2, 2]
        assert adapted_triangulation(self.square, doubled).total_volume() == 4

    def test_dict_round_trip(self):
        """Test the PL function JSON round trip"""
        T = triangulate(self.square, 1)
        g = self.hinge.vertex_values_on(T)
        h = PLConvexFunction.from_dict(g.to_dict(), self.square)
        assert all(h(p) == g(p) for p in T.points)
        assert PLConvexFunction.from_dict(self.hinge.to_dict(), self.square)((1, 0)) == 1

    def test_wrong_triangulation_id(self):
        """Test a mismatched triangulation id"""
        data = self.hinge.vertex_values_on(triangulate(self.square, 1)).to_dict()
        data["triangulation_ref"]["id"] = "0" * 12
        with pytest.raises(ValueError):
            PLConvexFunction.from_dict(data, self.square)

    def test_negative_scale(self):
        """Test scaling by a negative factor"""
        with pytest.raises(ValueError):
            self.hinge.scale(-1)

    def test_pl_min(self):
        """Test the minimum of two PL functions"""
        mirror = PLConvexFunction.max_of_affine([AffineFunction(0, (0, 0)), AffineFunction(0, (-1, 0))],
                                                self.square)
        pieces = pl_min(self.hinge, mirror, triangulate(self.square, 1))
        assert all(value == 0 for _, values in pieces for value in values)
        assert sum(simplex_volume(simplex) for simplex, _ in pieces) == 4

    def test_adapted_triangulation(self):
        """Test a triangulation adapted to a tilted hinge"""
        tilted = PLConvexFunction.max_of_affine([AffineFunction(0, (0, 0)), AffineFunction(F(1, 3), (1, 1))],
                                                self.square)
        T = adapted_triangulation(self.square, tilted)
        assert T.total_volume() == 4
        for simplex in T.simplex_points():
            tilted.affine_on(simplex)


class TestFunctional:
    """Test cases for L, Futaki invariants, normalization and the Monge-Ampere measure"""

    def setup_method(self):
        self.square = box([-1, -1], [1, 1])
        self.simplex = standard_simplex(2)
        self.one = Polynomial.constant(2, 1)
        self.hinge = PLConvexFunction.max_of_affine([AffineFunction(0, (0, 0)), AffineFunction(0, (1, 0))],
                                                    self.square)
        self.rng = random.Random(DEFAULT_SEED)

    def test_L_hinge(self):
        """Test L of the hinge on the square"""
        c = c_constant(self.square, self.one, self.one)
        assert evaluate_L(self.hinge, self.square, self.one, self.one, c, triangulate(self.square, 1)) == 2

    def test_futaki_vanishes_for_extremal_weight(self):
        """Test Futaki vanishing for w * l_ext"""
        w = 1 + Polynomial.variable(2, 0)
        ell = solve_extremal(self.simplex, self.one, w).as_polynomial()
        for _ in range(5):
            xi = AffineFunction(F(self.rng.randint(-5, 5)), (F(self.rng.randint(-5, 5)), F(self.rng.randint(-5, 5))))
            assert weighted_futaki(xi, self.simplex, self.one, w * ell, 1) == 0

    def test_futaki_constant_with_c(self):
        """Test the Futaki invariant of a constant"""
        c = c_constant(self.simplex, self.one, self.one)
        assert weighted_futaki(AffineFunction(1, (0, 0)), self.simplex, self.one, self.one, c) == 0

    def _random_function(self, P):
        pieces = [AffineFunction(F(self.rng.randint(-6, 6), 4),
                                 (F(self.rng.randint(-3, 3), 2), F(self.rng.randint(-3, 3), 2)))
                  for _ in range(self.rng.randint(1, 3))]
        return PLConvexFunction.max_of_affine(pieces, P)

    def test_L_ignores_affine_part(self):
        """Test L(f + xi) = L(f) for w * l_ext on the square and the simplex"""
        for P in (self.square, self.simplex):
            w_eff = self.one * solve_extremal(P, self.one, self.one).as_polynomial()
            for _ in range(25):
                f = self._random_function(P)
                T = adapted_triangulation(P, f)
                base = evaluate_L(f, P, self.one, w_eff, 1, T)
                for _ in range(2):
                    xi = AffineFunction(F(self.rng.randint(-9, 9), 4),
                                        (F(self.rng.randint(-9, 9), 4), F(self.rng.randint(-9, 9), 4)))
                    assert evaluate_L(f.plus_affine(xi), P, self.one, w_eff, 1, T) == base

    def test_normalize(self):
        """Test normalization at the origin"""
        f = PLConvexFunction.max_of_affine([AffineFunction(1, (0, 1)), AffineFunction(1, (1, 1))], self.square)
        g = normalize(f, (0, 0))
        assert g((0, 0)) == 0
        assert g((1, F(3, 10))) == F(1, 2)
        assert g((-1, 0)) == F(1, 2)
        assert g((F(-1, 2), 1)) == F(1, 4)

    def test_normalize_outside(self):
        """Test normalization at a boundary point"""
        with pytest.raises(PointNotInterior):
            normalize(self.hinge, (1, 0))

    def test_monge_ampere_atoms(self):
        """Test Monge-Ampere atoms of the hinge"""
        measure = discrete_MA(self.hinge, self.one, self.square)
        assert len(measure.atoms) == 2
        assert [atom.mass for atom in measure.atoms] == [2, 2]
        assert measure.total_mass == 4
        assert measure.to_dict()["total_mass"] == "4"


class TestDestabilizer:
    """Test cases for the LP search and the full stability check"""

    def setup_method(self):
        self.square = box([-1, -1], [1, 1])
        self.interval = box([0], [1])
        self.simplex = standard_simplex(2)

    def test_misweighted_square_destabilized(self):
        """Test a destabilizer for the mis-weighted square"""
        one = Polynomial.constant(2, 1)
        w_eff = 4 + 4 * (Polynomial.variable(2, 0) + Polynomial.variable(2, 1))
        T = triangulate(self.square, 1, (0, 0))
        report = search_destabilizer(self.square, one, w_eff, T, (0, 0), c=1)
        assert report.lp_status == LPStatus.OPTIMAL
        assert report.delta <= F(-2, 3)
        assert report.destabilized
        assert report.normalization_checks["boundary_integral"] == 1
        assert report.normalization_checks["value_at_y0"] == 0
        assert report.normalization_checks["min_value"] >= 0
        assert report.delta_check == report.delta

    def test_interval_threshold(self):
        """Test delta on the unit interval"""
        one = Polynomial.constant(1, 1)
        report = check_stability(self.interval, one, one, _Config(refinement=1))
        assert report.delta == 1
        assert report.trend == [(1, 1), (2, 1)]
        assert report.minimizer.is_convex()

    def test_interval_grid_oracle(self):
        """Test the LP against a grid search on [0, 1]"""
        # brute force over convex functions on the points 0, 1/4, 1/2, 3/4, 1 with step 1/8
        grid = [F(i, 8) for i in range(9)]
        best = None
        for f0, f1, f3 in product(grid, repeat=3):
            f2, f4 = F(0), 1 - f0
            if f4 < 0 or f0 - 2 * f1 + f2 < 0 or f1 - 2 * f2 + f3 < 0 or f2 - 2 * f3 + f4 < 0:
                continue
            integral = F(1, 4) * (f0 / 2 + f1 + f2 + f3 + f4 / 2)
            value = 2 * (f0 + f4) - 4 * integral
            best = value if best is None else min(best, value)
        one = Polynomial.constant(1, 1)
        report = check_stability(self.interval, one, one, _Config(refinement=1, trend=False))
        assert best == 1
        assert report.delta <= best

    def test_square_stable_and_monotone(self):
        """Test the square check and its trend"""
        one = Polynomial.constant(2, 1)
        report = check_stability(self.square, one, one, _Config(refinement=0))
        assert report.delta > 0
        assert not report.destabilized
        assert report.trend[1][1] <= report.trend[0][1]
        assert report.extremal.ell.coefficients == (4, 0, 0)

    def test_simplex_monotone(self):
        """Test the triangle check and its trend"""
        one = Polynomial.constant(2, 1)
        report = check_stability(self.simplex, one, one, _Config(refinement=0))
        assert report.delta > 0
        assert report.trend[1][1] <= report.trend[0][1]

    def test_y0_not_a_point(self):
        """Test y0 outside the triangulation points"""
        one = Polynomial.constant(2, 1)
        with pytest.raises(ValueError):
            search_destabilizer(self.square, one, 4 * one, triangulate(self.square, 0), (F(1, 3), F(1, 7)))

    def test_y0_outside(self):
        """Test y0 on the boundary"""
        one = Polynomial.constant(2, 1)
        with pytest.raises(PointNotInterior):
            search_destabilizer(self.square, one, 4 * one, triangulate(self.square, 0), (1, 1))

    def test_refinement_monotone_through_k2(self):
        """Test delta(k + 1) <= delta(k) for k = 0, 1, 2 on the square and the simplex"""
        for P in (self.square, self.simplex):
            one = Polynomial.constant(2, 1)
            w_eff = one * solve_extremal(P, one, one).as_polynomial()
            y0 = P.default_base_point()
            deltas = [search_destabilizer(P, one, w_eff, triangulate(P, k, y0), y0).delta for k in (0, 1, 2)]
            assert all(d > 0 for d in deltas)
            assert all(finer <= coarser for coarser, finer in zip(deltas, deltas[1:]))

    def test_exact_report_is_consistent(self):
        """Test that the LP optimum equals L re-evaluated on the minimizer"""
        one = Polynomial.constant(1, 1)
        report = check_stability(self.interval, one, one, _Config(refinement=0, trend=False))
        assert report.consistent
        assert report.log_concavity.log_concave

    def test_float_report_is_consistent(self):
        """Test the float LP path against the re-evaluated functional"""
        one = Polynomial.constant(2, 1)
        w_eff = 4 * smooth_weight_from_table("gaussian", [0.25, 0.0, 0.0], 2)
        report = search_destabilizer(self.square, one, w_eff, triangulate(self.square, 1, (0, 0)), (0, 0))
        assert not report.exact
        assert report.consistent
        assert report.to_dict()["consistent"] is True

    def test_inconsistent_float_report_is_flagged(self):
        """Test that a float delta away from L(minimizer) is flagged"""
        report = StabilityReport(delta=0.5, minimizer=None, lp_status=LPStatus.OPTIMAL, triangulation_id="0" * 12,
                                 normalization_checks={}, y0=(F(0),), refinement=0, exact=False,
                                 delta_check=0.5 + 1e-6)
        assert not report.consistent
        assert report.to_dict()["consistent"] is False

    def test_report_dict(self):
        """Test the stability report document"""
        one = Polynomial.constant(1, 1)
        data = check_stability(self.interval, one, one, _Config(refinement=0, trend=False)).to_dict()
        assert data["caveat"] == ONE_SIDED_CAVEAT
        assert data["lp_status"] == "Optimal"
        assert data["delta"] == "1"
        assert data["destabilized"] is False
        assert "triangulation_ref" in data["minimizer"]
        assert data["consistent"] is True
        assert data["v_log_concavity"]["log_concave"] is True


if __name__ == "__main__":
    pytest.main([__file__])
