"""
Unit tests for the simplex-method LP solver
"""

import pytest
from fractions import Fraction
from pathlib import Path

import sys
sys.path.append(str(Path(__file__).parent.parent / "src"))
from optimization.lp import LinearConstraint, LPStatus, lp_solve


class TestLPSolve:
    """Test cases for exact and float LP solves"""

    def test_lower_bound(self):
        """Test a bounded minimum"""
        result = lp_solve([1], [LinearConstraint((1,), ">=", 3)])
        assert result.status == LPStatus.OPTIMAL
        assert result.value == 3
        assert result.point == (3,)
        assert result.exact

    def test_unbounded(self):
        """Test an unbounded objective"""
        result = lp_solve([-1], [LinearConstraint((1,), ">=", 0)])
        assert result.status == LPStatus.UNBOUNDED
        assert result.point is None

    def test_infeasible(self):
        """Test infeasible constraints"""
        result = lp_solve([1], [LinearConstraint((1,), ">=", 2), LinearConstraint((1,), "<=", 1)])
        assert result.status == LPStatus.INFEASIBLE

    def test_equality(self):
        """Test equality constraints"""
        result = lp_solve([1, 1], [LinearConstraint((1, 1), "==", 1)])
        assert result.status == LPStatus.OPTIMAL
        assert result.value == 1

    def test_rational_optimum(self):
        """Test an exact rational optimum"""
        # min -x - y  s.t.  3x + y <= 2, x + 3y <= 2
        result = lp_solve([-1, -1], [LinearConstraint((3, 1), "<=", 2), LinearConstraint((1, 3), "<=", 2)])
        assert result.value == Fraction(-1)
        assert result.point == (Fraction(1, 2), Fraction(1, 2))

    def test_negative_rhs_normalized(self):
        """Test rows with a negative right-hand side"""
        result = lp_solve([1], [LinearConstraint((-1,), "<=", -3)])
        assert result.value == 3

    def test_float_path(self):
        """Test the float tableau"""
        result = lp_solve([1.0], [LinearConstraint((1.0,), ">=", 2.5)])
        assert not result.exact
        assert result.value == pytest.approx(2.5)

    def test_invalid_sense(self):
        """Test an unknown constraint sense"""
        with pytest.raises(ValueError):
            LinearConstraint((1,), "<", 0)

    def test_length_mismatch(self):
        """Test coefficient length validation"""
        with pytest.raises(ValueError):
            lp_solve([1, 1], [LinearConstraint((1,), ">=", 0)])


if __name__ == "__main__":
    pytest.main([__file__])
