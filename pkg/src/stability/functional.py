"""
The weighted Donaldson functional on PL convex functions, weighted Futaki
invariants, normalization, and the discrete weighted Monge-Ampere measure.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence

from extremal.affine import AffineFunction
from geometry.linalg import to_vector
from geometry.polytope import Polytope, format_rational
from quadrature.integrate import integrate_pl_product, integrate_weight, integrate_weight_boundary
from quadrature.polynomial import Weight
from stability.pl_functions import PLConvexFunction
from utils.errors import PointNotInterior

logger = logging.getLogger(__name__)


def evaluate_L(f: PLConvexFunction, P: Polytope, v: Weight, w_eff: Weight, c, T):
    """
    L(f) = 2 int_{dP} f v d(sigma) - c int_P f w_eff dy.

    Use w_eff = w * l_ext with c = 1 for the extremal-relative functional.

    Raises:
        TriangulationTooCoarse: T does not refine the linearity cells of f
    """
    boundary = integrate_pl_product(f, v, T, boundary=True)
    region = integrate_pl_product(f, w_eff, T)
    return 2 * boundary - c * region


def weighted_futaki(xi: AffineFunction, P: Polytope, v: Weight, w: Weight, c, T=None):
    """Fut(xi) = 2 int_{dP} xi v d(sigma) - c int_P xi w dy"""
    T = T or P.base_triangulation
    factor = xi.as_polynomial()
    return 2 * integrate_weight_boundary(v, P, T, factor) - c * integrate_weight(w, T, factor)


def normalize(f: PLConvexFunction, y0: Sequence) -> PLConvexFunction:
    """
    Subtract the supporting affine function of f at y0.

    The result is nonnegative, vanishes at y0 and differs from f by an affine
    function.

    Raises:
        PointNotInterior: y0 is not in the interior of the domain
    """
    y0 = to_vector(y0)
    if not f.domain.contains(y0, strict=True):
        raise PointNotInterior(f"y0 = {[format_rational(x) for x in y0]} is not interior to the polytope")
    return f.minus_affine(f.supporting_affine(y0))


@dataclass(frozen=True)
class MAAtom:
    cell: Polytope
    gradient: tuple
    mass: object

    def to_dict(self) -> Dict:
        def fmt(x):
            return format_rational(x) if isinstance(x, (int, Fraction)) else float(x)

        return {
            "gradient": [format_rational(g) for g in self.gradient],
            "mass": fmt(self.mass),
            "cell": self.cell.to_dict(),
        }


@dataclass(frozen=True)
class NAMeasureAtoms:
    atoms: List[MAAtom]

    @property
    def total_mass(self):
        masses = [a.mass for a in self.atoms]
        start = Fraction(0) if all(isinstance(m, Fraction) for m in masses) else 0.0
        return sum(masses, start)

    def to_dict(self) -> Dict:
        total = self.total_mass
        return {
            "atoms": [a.to_dict() for a in self.atoms],
            "total_mass": format_rational(total) if isinstance(total, Fraction) else float(total),
        }


def discrete_MA(f: PLConvexFunction, v: Weight, P: Polytope) -> NAMeasureAtoms:
    """One atom per maximal linearity cell of f, carrying its slope and int_cell v dy"""
    atoms = []
    for form, cell in f.cells():
        mass = integrate_weight(v, cell.base_triangulation)
        atoms.append(MAAtom(cell=cell, gradient=form.gradient, mass=mass))
    measure = NAMeasureAtoms(atoms)
    logger.debug(f"Monge-Ampere measure: {len(atoms)} atoms, total mass {measure.total_mass}")
    return measure
