"""
The d_{v,1} pseudo-metric between toric filtrations and its quotient by
constant shifts.

For PL data d_{v,1}(f1, f2) = vol(f1) + vol(f2) - 2 vol(min(f1, f2)), which
equals the weighted L1 distance int_P |f1 - f2| v dy. Both are computed on
the simplices of T split along {f1 = f2}.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from config.settings import FLOAT_TOLERANCE
from extremal.affine import AffineFunction
from geometry.linalg import Vector
from geometry.polytope import Polytope
from geometry.triangulation import clip_simplex
from quadrature.integrate import simplex_moments
from quadrature.polynomial import Weight
from filtration.volumes import weighted_volume_exact
from stability.pl_functions import PLConvexFunction, adapted_triangulation, pl_min
from utils.errors import ToricStabilityError

logger = logging.getLogger(__name__)

BISECTION_STEPS = 60


def _integrate_values(v: Weight, simplex: Sequence[Vector], values: Optional[Sequence] = None):
    """int_S v, or int_S (affine interpolant of values) * v"""
    total, moments = simplex_moments(v, simplex)
    if values is None:
        return total
    return sum(x * m for x, m in zip(values, moments))


@dataclass(frozen=True)
class DistanceResult:
    value: object
    l1_value: object

    @property
    def consistent(self) -> bool:
        if isinstance(self.value, Fraction) and isinstance(self.l1_value, Fraction):
            return self.value == self.l1_value
        return abs(float(self.value) - float(self.l1_value)) <= FLOAT_TOLERANCE * (1 + abs(float(self.value)))


def d_v1_detailed(f1: PLConvexFunction, f2: PLConvexFunction, v: Weight, P: Polytope, T=None) -> DistanceResult:
    """Both the min formula and the L1 formula for d_{v,1}"""
    T = T or adapted_triangulation(P, f1, f2)
    pieces = pl_min(f1, f2, T)
    min_volume = sum((_integrate_values(v, simplex, values) for simplex, values in pieces), Fraction(0))
    value = weighted_volume_exact(f1, v, P, T) + weighted_volume_exact(f2, v, P, T) - 2 * min_volume

    l1 = Fraction(0)
    for simplex in T.simplex_points():
        h = f1.affine_on(simplex) - f2.affine_on(simplex)
        for sign in (1, -1):
            for part in _clip_affine(simplex, h.scale(sign), Fraction(0), strict_side=(sign == -1)):
                l1 += _integrate_values(v, part, [sign * h.evaluate(p) for p in part])
    return DistanceResult(value, l1)


def d_v1(f1: PLConvexFunction, f2: PLConvexFunction, v: Weight, P: Polytope, T=None):
    """
    d_{v,1}(f1, f2) via the min formula, cross-checked against int |f1 - f2| v.

    Raises:
        TriangulationTooCoarse: T does not refine the linearity cells of f1 and f2
    """
    result = d_v1_detailed(f1, f2, v, P, T)
    if not result.consistent:
        logger.error(f"d_v1 mismatch: min formula {result.value}, L1 formula {result.l1_value}")
        raise ToricStabilityError("d_v1 formulas disagree")
    return result.value


def _clip_affine(simplex, h: AffineFunction, c, strict_side: bool = False) -> List[List[Vector]]:
    """Pieces of the simplex where h >= c; with strict_side, a region where h == c is dropped"""
    if all(g == 0 for g in h.gradient):
        keep = h.constant > c if strict_side else h.constant >= c
        return [list(simplex)] if keep else []
    return clip_simplex(simplex, h.gradient, h.constant - c)


@dataclass(frozen=True)
class QuotientDistance:
    value: object
    shift: object

    def __float__(self):
        return float(self.value)


class _Difference:
    """h = f2 - f1 restricted to the simplices of T"""

    def __init__(self, f1, f2, v, T):
        self.v = v
        self.pieces: List[Tuple[List[Vector], AffineFunction]] = [
            (s, f2.affine_on(s) - f1.affine_on(s)) for s in T.simplex_points()
        ]
        self.total = sum((_integrate_values(v, s) for s, _ in self.pieces), Fraction(0))

    def breakpoints(self) -> List[Fraction]:
        return sorted({h.evaluate(p) for s, h in self.pieces for p in s})

    def mass_at_least(self, c) -> object:
        """mu{h >= c}"""
        return sum((_integrate_values(self.v, part) for s, h in self.pieces
                    for part in _clip_affine(s, h, c)), Fraction(0))

    def mass_at_most(self, c) -> object:
        """mu{h <= c}"""
        return sum((_integrate_values(self.v, part) for s, h in self.pieces
                    for part in _clip_affine(s, h.scale(-1), -c)), Fraction(0))

    def objective(self, c) -> object:
        """int |h - c| v dy"""
        total = Fraction(0)
        for s, h in self.pieces:
            shifted = h - AffineFunction(c, (0,) * len(h.gradient))
            for sign in (1, -1):
                for part in _clip_affine(s, shifted.scale(sign), 0, strict_side=(sign == -1)):
                    total += _integrate_values(self.v, part, [sign * shifted.evaluate(p) for p in part])
        return total


def weighted_median_shift(f1: PLConvexFunction, f2: PLConvexFunction, v: Weight, P: Polytope, T=None):
    """
    A weighted median of f2 - f1 under v dy.

    Breakpoints of the PL difference are tested exactly first; between two
    consecutive breakpoints the distribution function is continuous and the
    median is found by bisection.
    """
    T = T or adapted_triangulation(P, f1, f2)
    h = _Difference(f1, f2, v, T)
    half = h.total / 2
    points = h.breakpoints()
    for b in points:
        below = h.total - h.mass_at_least(b)
        if below <= half <= h.mass_at_most(b):
            return b
    low = max(b for b in points if h.mass_at_most(b) < half)
    high = min(b for b in points if h.total - h.mass_at_least(b) > half)
    for _ in range(BISECTION_STEPS):
        middle = (low + high) / 2
        mass = h.mass_at_most(middle)
        if mass == half:
            return middle
        if mass < half:
            low = middle
        else:
            high = middle
    return (low + high) / 2


def quotient_distance(f1: PLConvexFunction, f2: PLConvexFunction, v: Weight, P: Polytope, T=None) -> QuotientDistance:
    """
    min over constants c of int_P |f2 - f1 - c| v dy, attained at the weighted median.

    Raises:
        TriangulationTooCoarse
    """
    T = T or adapted_triangulation(P, f1, f2)
    shift = weighted_median_shift(f1, f2, v, P, T)
    value = _Difference(f1, f2, v, T).objective(shift)
    logger.debug(f"Quotient distance {value} at shift {shift}")
    return QuotientDistance(value, shift)

