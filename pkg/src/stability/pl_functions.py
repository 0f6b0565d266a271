"""
Rational piecewise-linear convex functions on a polytope.

Two representations are supported: the maximum of finitely many affine
functions, and values at the points of a triangulation interpolated
linearly on each simplex.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Sequence, Tuple

from extremal.affine import AffineFunction
from geometry.linalg import Vector, affine_interpolant, barycentric, dot, to_fraction, to_vector
from geometry.polytope import Polytope, build_from_halfspaces, build_from_vertices, format_rational
from geometry.triangulation import (Triangulation, Wall, clip_simplex, refine, triangulate,
                                    triangulation_from_simplices)
from quadrature.integrate import pl_vertex_values
from utils.errors import DegeneratePolytope, EmptyPolytope, PointNotInterior

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaxOfAffine:
    pieces: Tuple[AffineFunction, ...]

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("MaxOfAffine needs at least one piece")
        # drop duplicates, keep first-seen order
        unique = []
        for piece in self.pieces:
            if piece not in unique:
                unique.append(piece)
        object.__setattr__(self, "pieces", tuple(unique))

    def evaluate(self, point: Sequence):
        return max(piece.evaluate(point) for piece in self.pieces)

    def active(self, point: Sequence) -> List[AffineFunction]:
        value = self.evaluate(point)
        return [piece for piece in self.pieces if piece.evaluate(point) == value]


@dataclass(frozen=True, eq=False)
class VertexValues:
    triangulation: Triangulation
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != len(self.triangulation.points):
            raise ValueError(f"expected {len(self.triangulation.points)} values, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(to_fraction(x) if not isinstance(x, float) else x
                                                 for x in self.values))

    def simplex_values(self, index: int) -> List:
        return [self.values[i] for i in self.triangulation.simplices[index]]

    def evaluate(self, point: Sequence):
        index = self.triangulation.point_index(point)
        if index is not None:
            return self.values[index]
        located = self.triangulation.locate(point)
        if located is None:
            raise PointNotInterior(f"point {list(point)} is outside the triangulated region")
        index, coords = located
        return sum((c * x for c, x in zip(coords, self.simplex_values(index))), Fraction(0))

    def simplex_slope(self, index: int) -> AffineFunction:
        simplex = self.triangulation.simplex_points()[index]
        gradient, constant = affine_interpolant(simplex, self.simplex_values(index))
        return AffineFunction(constant, gradient)


@dataclass(frozen=True, eq=False)
class PLConvexFunction:
    """Convex PL function on a polytope, in max-of-affine or vertex-value form"""

    representation: object
    domain: Polytope = field(repr=False)

    @classmethod
    def max_of_affine(cls, pieces: Sequence[AffineFunction], domain: Polytope) -> "PLConvexFunction":
        return cls(MaxOfAffine(tuple(pieces)), domain)

    @classmethod
    def from_vertex_values(cls, T: Triangulation, values: Sequence) -> "PLConvexFunction":
        return cls(VertexValues(T, tuple(values)), T.polytope)

    @classmethod
    def zero(cls, domain: Polytope) -> "PLConvexFunction":
        return cls.max_of_affine([AffineFunction(0, (0,) * domain.dim)], domain)

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def is_max_of_affine(self) -> bool:
        return isinstance(self.representation, MaxOfAffine)

    def evaluate(self, point: Sequence):
        return self.representation.evaluate(to_vector(point))

    __call__ = evaluate

    def affine_on(self, simplex: Sequence[Vector]) -> AffineFunction:
        """
        The affine form of f on a full-dimensional simplex.

        Raises:
            TriangulationTooCoarse: f is not affine there
        """
        gradient, constant = affine_interpolant(simplex, pl_vertex_values(self, simplex))
        return AffineFunction(constant, gradient)

    def supporting_affine(self, point: Sequence) -> AffineFunction:
        """
        An affine minorant of f touching it at the point.

        Max-of-affine: average of the active pieces. Vertex values: the
        slope of the first simplex (in triangulation order) containing the point.
        """
        point = to_vector(point)
        rep = self.representation
        if isinstance(rep, MaxOfAffine):
            active = rep.active(point)
            k = len(active)
            gradient = tuple(sum(g) / k for g in zip(*(a.gradient for a in active)))
        else:
            located = rep.triangulation.locate(point)
            if located is None:
                raise PointNotInterior(f"point {list(point)} is outside the triangulated region")
            gradient = rep.simplex_slope(located[0]).gradient
        return AffineFunction(self.evaluate(point) - dot(gradient, point), gradient)

    def minus_affine(self, xi: AffineFunction) -> "PLConvexFunction":
        return self.plus_affine(xi.scale(-1))

    def plus_affine(self, xi: AffineFunction) -> "PLConvexFunction":
        rep = self.representation
        if isinstance(rep, MaxOfAffine):
            return PLConvexFunction(MaxOfAffine(tuple(p + xi for p in rep.pieces)), self.domain)
        T = rep.triangulation
        return PLConvexFunction(VertexValues(T, tuple(x + xi.evaluate(p) for x, p in zip(rep.values, T.points))),
                                self.domain)

    def scale(self, factor) -> "PLConvexFunction":
        factor = to_fraction(factor)
        if factor < 0:
            raise ValueError("only nonnegative multiples of a convex function are convex")
        rep = self.representation
        if isinstance(rep, MaxOfAffine):
            return PLConvexFunction(MaxOfAffine(tuple(p.scale(factor) for p in rep.pieces)), self.domain)
        return PLConvexFunction(VertexValues(rep.triangulation, tuple(factor * x for x in rep.values)), self.domain)

    def convexity_violations(self, tolerance=0) -> List[Wall]:
        """Interior walls across which the vertex values fail the convexity inequality"""
        rep = self.representation
        if isinstance(rep, MaxOfAffine):
            return []
        T = rep.triangulation
        bad = []
        for wall in T.interior_walls:
            q = next(i for i in T.simplices[wall.right] if i not in wall.face)
            left = [T.points[i] for i in T.simplices[wall.left]]
            mu = barycentric(left, T.points[q])
            extension = sum((m * rep.values[i] for m, i in zip(mu, T.simplices[wall.left])), Fraction(0))
            if rep.values[q] - extension < -tolerance:
                bad.append(wall)
        return bad

    def is_convex(self, tolerance=0) -> bool:
        return not self.convexity_violations(tolerance)

    def cells(self) -> List[Tuple[AffineFunction, Polytope]]:
        """Maximal linearity cells of f as (affine form, sub-polytope), sorted by gradient"""
        rep = self.representation
        if isinstance(rep, MaxOfAffine):
            result = _max_of_affine_cells(rep.pieces, self.domain)
        else:
            groups: Dict[AffineFunction, List[Vector]] = {}
            for index, simplex in enumerate(rep.triangulation.simplex_points()):
                groups.setdefault(rep.simplex_slope(index), []).extend(simplex)
            result = [(form, build_from_vertices(points)) for form, points in groups.items()]
        return sorted(result, key=lambda item: (item[0].gradient, item[0].constant))

    def vertex_values_on(self, T: Triangulation) -> "PLConvexFunction":
        """Values of f at the points of T as a vertex-value function"""
        return PLConvexFunction.from_vertex_values(T, [self.evaluate(p) for p in T.points])

    def to_dict(self) -> Dict:
        rep = self.representation
        if isinstance(rep, MaxOfAffine):
            return {"max_of_affine": [p.to_dict() for p in rep.pieces]}
        T = rep.triangulation
        return {
            "triangulation_ref": {"refinement": T.refinement, "id": T.triangulation_id,
                                  "points": [[format_rational(x) for x in p] for p in T.points]},
            "values": [format_rational(x) if not isinstance(x, float) else x for x in rep.values],
        }

    @classmethod
    def from_dict(cls, data: Dict, domain: Polytope) -> "PLConvexFunction":
        """
        Read {"max_of_affine": [...]} or {"triangulation_ref": {...}, "values": [...]}.

        A triangulation reference names a refinement level k and optionally a
        base point y0; it resolves to triangulate(domain, k, y0). When an id
        is given it must match.
        """
        if "max_of_affine" in data:
            pieces = [AffineFunction.from_dict(p) for p in data["max_of_affine"]]
            for piece in pieces:
                if piece.dim != domain.dim:
                    raise ValueError(f"affine piece of dimension {piece.dim} on a {domain.dim}-dimensional polytope")
            return cls.max_of_affine(pieces, domain)
        if "values" not in data:
            raise ValueError("PL function needs 'max_of_affine' or 'triangulation_ref' with 'values'")
        ref = data.get("triangulation_ref") or {}
        y0 = ref.get("y0")
        T = triangulate(domain, int(ref.get("refinement", 0)), to_vector(y0) if y0 is not None else None)
        if ref.get("id") and ref["id"] != T.triangulation_id:
            raise ValueError(f"triangulation id {ref['id']} does not match rebuilt id {T.triangulation_id}")
        return cls.from_vertex_values(T, [to_fraction(x) for x in data["values"]])

    def __repr__(self):
        rep = self.representation
        if isinstance(rep, MaxOfAffine):
            return f"PLConvexFunction(max of {len(rep.pieces)} affine pieces)"
        return f"PLConvexFunction(values on {rep.triangulation!r})"


def _max_of_affine_cells(pieces: Sequence[AffineFunction], domain: Polytope) -> List[Tuple[AffineFunction, Polytope]]:
    cells = []
    for i, piece in enumerate(pieces):
        halfspaces = list(domain.halfspaces)
        empty = False
        for j, other in enumerate(pieces):
            if i == j:
                continue
            difference = piece - other
            if all(g == 0 for g in difference.gradient):
                # parallel pieces: the larger constant owns the cell, ties go to the first
                if difference.constant < 0 or (difference.constant == 0 and j < i):
                    empty = True
                    break
                continue
            halfspaces.append((difference.gradient, difference.constant))
        if empty:
            continue
        try:
            cells.append((piece, build_from_halfspaces(halfspaces)))
        except (EmptyPolytope, DegeneratePolytope):
            continue
    return cells


def adapted_triangulation(P: Polytope, *functions: PLConvexFunction, refinement: int = 0) -> Triangulation:
    """
    Triangulation of P whose simplices each lie in one linearity cell of every
    given function, refined k times.

    Cells of different functions are intersected and triangulated
    separately, so the result need not be face-to-face across cell
    boundaries; it is meant for integration, not for the LP.
    """
    cell_lists = [[cell for _, cell in f.cells()] for f in functions] or [[P]]
    simplices = []
    for combination in product(*cell_lists):
        halfspaces = [h for cell in combination for h in cell.halfspaces]
        try:
            region = build_from_halfspaces(halfspaces)
        except (EmptyPolytope, DegeneratePolytope):
            continue
        simplices.extend(region.base_triangulation.simplex_points())
    T = triangulation_from_simplices(P, simplices)
    for _ in range(refinement):
        T = refine(T)
    logger.debug(f"Adapted triangulation for {len(functions)} functions: {T!r}")
    return T


def pl_min(f1: PLConvexFunction, f2: PLConvexFunction, T: Triangulation) -> List[Tuple[List[Vector], list]]:
    """
    min(f1, f2) on T as simplex pieces on which it is affine.

    Each simplex is split along {f1 = f2}; returns (simplex, vertex values of
    the min) pairs.
    """
    pieces = []
    for simplex in T.simplex_points():
        a1 = f1.affine_on(simplex)
        a2 = f2.affine_on(simplex)
        difference = a1 - a2
        for sign, lower in ((1, a2), (-1, a1)):
            # sign * (f1 - f2) >= 0 is where the min is `lower`
            normal = tuple(sign * g for g in difference.gradient)
            if all(g == 0 for g in normal):
                if (difference.constant >= 0) == (sign == 1):
                    pieces.append((simplex, [lower.evaluate(p) for p in simplex]))
                continue
            for part in clip_simplex(simplex, normal, sign * difference.constant):
                pieces.append((part, [lower.evaluate(p) for p in part]))
    return pieces

