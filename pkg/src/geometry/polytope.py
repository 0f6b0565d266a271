"""
Rational moment polytopes: H/V representations, facets with the
lattice-normalized boundary measure, and epsilon-perturbations.

All predicates use exact rational arithmetic.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from config.settings import MAX_DIMENSION
from geometry.linalg import (Vector, affine_rank, determinant, dot, hyperplane_through, primitive,
                             solve, sub, to_fraction, to_vector)
from optimization.lp import LinearConstraint, LPStatus, lp_solve
from utils.errors import (DegeneratePolytope, EmptyPolytope, InvalidPerturbation,
                          UnboundedPolytope)

logger = logging.getLogger(__name__)

Halfspace = Tuple[Tuple[int, ...], Fraction]


@dataclass(frozen=True)
class Facet:
    """Facet {<u, y> + a = 0} of a polytope, with u primitive"""

    normal: Tuple[int, ...]
    offset: Fraction
    vertex_ids: Tuple[int, ...]

    @property
    def norm_squared(self) -> int:
        return sum(x * x for x in self.normal)

    @property
    def lattice_density(self) -> float:
        """Factor converting Euclidean (n-1)-measure to d(sigma); irrational in general"""
        return self.norm_squared ** -0.5

    def value(self, point: Sequence) -> Fraction:
        return dot(self.normal, point) + self.offset

    def simplex_measure(self, points: Sequence[Sequence]) -> Fraction:
        """
        d(sigma)-measure of an (n-1)-simplex lying in this facet.

        Euclidean volume is |det(edges, u)| / (|u| (n-1)!), so dividing by |u|
        gives the rational |det(edges, u)| / (|u|^2 (n-1)!).
        """
        n = len(self.normal)
        edges = [sub(p, points[0]) for p in points[1:]]
        matrix = [list(e) for e in edges] + [list(self.normal)]
        factorial = 1
        for k in range(2, n):
            factorial *= k
        return abs(determinant(matrix)) / (self.norm_squared * factorial)


@dataclass(frozen=True)
class Polytope:
    """
    Full-dimensional bounded rational polytope {y : <u_F, y> + a_F >= 0 for all F}.

    Construct with build_from_halfspaces or build_from_vertices; the
    dataclass constructor performs no validation.
    """

    dim: int
    halfspaces: Tuple[Halfspace, ...]
    vertices: Tuple[Vector, ...]
    facet_incidence: Tuple[Tuple[int, ...], ...] = field(compare=False)

    @property
    def facets(self) -> List[Facet]:
        return [Facet(u, a, ids) for (u, a), ids in zip(self.halfspaces, self.facet_incidence)]

    def contains(self, point: Sequence, strict: bool = False) -> bool:
        point = to_vector(point)
        if strict:
            return all(dot(u, point) + a > 0 for u, a in self.halfspaces)
        return all(dot(u, point) + a >= 0 for u, a in self.halfspaces)

    def slack(self, point: Sequence) -> Tuple[Fraction, ...]:
        point = to_vector(point)
        return tuple(dot(u, point) + a for u, a in self.halfspaces)

    @cached_property
    def base_triangulation(self):
        from geometry.triangulation import triangulate
        return triangulate(self, 0)

    @cached_property
    def volume(self) -> Fraction:
        return self.base_triangulation.total_volume()

    @cached_property
    def centroid(self) -> Vector:
        T = self.base_triangulation
        total = Fraction(0)
        moment = [Fraction(0)] * self.dim
        for simplex in T.simplex_points():
            vol = simplex_volume(simplex)
            total += vol
            for i in range(self.dim):
                moment[i] += vol * sum(p[i] for p in simplex) / (self.dim + 1)
        return tuple(m / total for m in moment)

    def default_base_point(self) -> Vector:
        """The origin when it is interior, otherwise the centroid"""
        origin = tuple(Fraction(0) for _ in range(self.dim))
        return origin if self.contains(origin, strict=True) else self.centroid

    def facet_measure_total(self) -> Fraction:
        """Total d(sigma)-measure of the boundary"""
        total = Fraction(0)
        for facet_index, faces in self.base_triangulation.boundary_simplices.items():
            facet = self.facets[facet_index]
            points = self.base_triangulation.points
            for face in faces:
                total += facet.simplex_measure([points[i] for i in face])
        return total

    def is_delzant(self) -> bool:
        """Smoothness test: at every vertex the n incident facet normals form a Z-basis"""
        for vid in range(len(self.vertices)):
            incident = [u for (u, _), ids in zip(self.halfspaces, self.facet_incidence) if vid in ids]
            if len(incident) != self.dim:
                return False
            if abs(determinant(incident)) != 1:
                return False
        return True

    def to_dict(self, include_vertices: bool = True) -> Dict:
        data = {
            "dim": self.dim,
            "halfspaces": [{"normal": list(u), "offset": format_rational(a)} for u, a in self.halfspaces],
        }
        if include_vertices:
            data["vertices"] = [[format_rational(x) for x in v] for v in self.vertices]
        return data

    def __repr__(self):
        return f"Polytope(dim={self.dim}, facets={len(self.halfspaces)}, vertices={len(self.vertices)})"


def format_rational(value) -> str:
    value = to_fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def simplex_volume(points: Sequence[Sequence]) -> Fraction:
    n = len(points) - 1
    factorial = 1
    for k in range(2, n + 1):
        factorial *= k
    return abs(determinant([sub(p, points[0]) for p in points[1:]])) / factorial


def _interior_lp(halfspaces: Sequence[Halfspace], n: int):
    """max t s.t. <u, y> + a >= t, 0 <= t <= 1 with y split as y+ - y-"""
    objective = [Fraction(0)] * (2 * n) + [Fraction(-1)]
    constraints = []
    for u, a in halfspaces:
        coefficients = tuple(list(u) + [-x for x in u] + [-1])
        constraints.append(LinearConstraint(coefficients, ">=", -a))
    constraints.append(LinearConstraint(tuple([0] * (2 * n) + [1]), "<=", 1))
    return lp_solve(objective, constraints)


def _has_recession_direction(halfspaces: Sequence[Halfspace], n: int) -> bool:
    constraints = [
        LinearConstraint(tuple(list(u) + [-x for x in u]), ">=", 0) for u, _ in halfspaces
    ]
    for k in range(n):
        for sign in (1, -1):
            objective = [0] * (2 * n)
            objective[k] = -sign
            objective[n + k] = sign
            if lp_solve(objective, constraints).status == LPStatus.UNBOUNDED:
                return True
    return False


def _enumerate_vertices(halfspaces: Sequence[Halfspace], n: int) -> List[Vector]:
    found = set()
    for subset in combinations(range(len(halfspaces)), n):
        matrix = [halfspaces[i][0] for i in subset]
        rhs = [-halfspaces[i][1] for i in subset]
        point = solve(matrix, rhs)
        if point is None:
            continue
        if all(dot(u, point) + a >= 0 for u, a in halfspaces):
            found.add(point)
    return sorted(found)


def build_from_halfspaces(halfspaces: Sequence[Tuple[Sequence, object]]) -> Polytope:
    """
    Build a polytope from halfspaces <u, y> + a >= 0.

    Args:
        halfspaces: (normal, offset) pairs; normals are scaled to primitive
            integer vectors, offsets rescaled accordingly

    Returns:
        Polytope with enumerated vertices and redundant halfspaces removed
    """
    if not halfspaces:
        raise ValueError("halfspace list is empty")
    n = len(halfspaces[0][0])
    if n < 1 or n > MAX_DIMENSION:
        raise ValueError(f"dimension must be between 1 and {MAX_DIMENSION}, got {n}")

    normalized: Dict[Tuple[int, ...], Fraction] = {}
    for normal, offset in halfspaces:
        if len(normal) != n:
            raise ValueError("all normals must have the same length")
        u, a = primitive(normal, offset)
        # parallel halfspaces: keep the tighter one
        if u not in normalized or a < normalized[u]:
            normalized[u] = a
    merged = list(normalized.items())

    result = _interior_lp(merged, n)
    if result.status == LPStatus.INFEASIBLE:
        raise EmptyPolytope("halfspaces have empty intersection")
    if result.value == 0:
        raise DegeneratePolytope("halfspaces do not cut out a full-dimensional polytope")
    if _has_recession_direction(merged, n):
        raise UnboundedPolytope("halfspaces leave a nontrivial recession cone")

    vertices = _enumerate_vertices(merged, n)
    kept, incidence = [], []
    for u, a in merged:
        ids = tuple(i for i, v in enumerate(vertices) if dot(u, v) + a == 0)
        if affine_rank([vertices[i] for i in ids]) == n - 1:
            kept.append((u, a))
            incidence.append(ids)
    dropped = len(merged) - len(kept)
    if dropped:
        logger.debug(f"Removed {dropped} redundant halfspaces")
    logger.debug(f"Built polytope: dim={n}, facets={len(kept)}, vertices={len(vertices)}")
    return Polytope(n, tuple(kept), tuple(vertices), tuple(incidence))


def build_from_vertices(points: Sequence[Sequence]) -> Polytope:
    """Convex hull of rational points, with primitive facet normals"""
    points = sorted(set(to_vector(p) for p in points))
    if not points:
        raise DegeneratePolytope("no points given")
    n = len(points[0])
    if affine_rank(points) != n:
        raise DegeneratePolytope(f"points do not affinely span R^{n}")
    halfspaces = {}
    for subset in combinations(points, n):
        plane = hyperplane_through(subset)
        if plane is None:
            continue
        normal, offset = plane
        values = [dot(normal, p) + offset for p in points]
        if all(v >= 0 for v in values):
            u, a = primitive(normal, offset)
        elif all(v <= 0 for v in values):
            u, a = primitive([-x for x in normal], -offset)
        else:
            continue
        halfspaces[u] = a
    return build_from_halfspaces(list(halfspaces.items()))


def perturb(P: Polytope, extra: Sequence[Tuple[Sequence, object, object]], eps) -> Polytope:
    """
    Move P along eps by the entries of extra.

    An entry (u, a, r) adds the cutting halfspace <u, y> + a - eps * r >= 0.
    An entry (u, None, r) shifts the existing facet with normal u to
    <u, y> + a_F - eps * r >= 0; a negative rate moves it outwards.

    Raises:
        InvalidPerturbation: a cut already cuts P at eps = 0, or a shift names no facet
        EmptyPolytope / DegeneratePolytope: eps too large
    """
    eps = to_fraction(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    offsets = dict(P.halfspaces)
    cuts, shifts = [], []
    for normal, base, rate in extra:
        if base is None:
            u, r = primitive(normal, rate)
            if u not in offsets:
                raise InvalidPerturbation(f"no facet with normal {list(u)} to shift")
            shifts.append((u, r))
            continue
        worst = min(dot(to_vector(normal), v) + to_fraction(base) for v in P.vertices)
        if worst < 0:
            raise InvalidPerturbation(f"halfspace with normal {list(normal)} cuts P at eps = 0")
        cuts.append((normal, to_fraction(base) - eps * to_fraction(rate)))
    if eps == 0:
        return P
    for u, r in shifts:
        offsets[u] -= eps * r
    return build_from_halfspaces(list(offsets.items()) + cuts)


def stable_threshold(P: Polytope, extra: Sequence[Tuple[Sequence, object, object]]) -> Optional[Fraction]:
    """
    Largest eps below which each cut removes only the vertices closest to it.

    For a cut with vertex slacks h_1 <= h_2 <= ..., eps * rate must stay below
    the second distinct slack value; None when no cut has positive rate.
    Facet shifts are not bounded here.
    """
    bounds = []
    for normal, base, rate in extra:
        rate = to_fraction(rate)
        if base is None or rate <= 0:
            continue
        slacks = sorted(set(dot(to_vector(normal), v) + to_fraction(base) for v in P.vertices))
        if len(slacks) > 1:
            bounds.append(slacks[1] / rate)
    return min(bounds) if bounds else None


def polytope_from_dict(data: Dict) -> Polytope:
    """Read the JSON polytope schema; when both representations are present they must agree"""
    if "halfspaces" in data and data["halfspaces"]:
        P = build_from_halfspaces([(h["normal"], h["offset"]) for h in data["halfspaces"]])
        if data.get("vertices"):
            given = sorted(set(to_vector(v) for v in data["vertices"]))
            if given != list(P.vertices):
                raise DegeneratePolytope("vertex list does not match the halfspace representation")
    elif data.get("vertices"):
        P = build_from_vertices(data["vertices"])
    else:
        raise ValueError("polytope needs 'halfspaces' or 'vertices'")
    if "dim" in data and int(data["dim"]) != P.dim:
        raise ValueError(f"declared dim {data['dim']} does not match data dimension {P.dim}")
    return P


def box(lower: Sequence, upper: Sequence) -> Polytope:
    """Axis-parallel box, convenient for examples and tests"""
    halfspaces = []
    n = len(lower)
    for i in range(n):
        e = [0] * n
        e[i] = 1
        halfspaces.append((tuple(e), -to_fraction(lower[i])))
        halfspaces.append((tuple(-x for x in e), to_fraction(upper[i])))
    return build_from_halfspaces(halfspaces)


def standard_simplex(n: int, scale=1) -> Polytope:
    halfspaces = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        halfspaces.append((tuple(e), Fraction(0)))
    halfspaces.append((tuple([-1] * n), to_fraction(scale)))
    return build_from_halfspaces(halfspaces)
