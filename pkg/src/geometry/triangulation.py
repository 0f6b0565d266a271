"""
Triangulations of rational polytopes: placing construction, stellar
insertion of a base point, and edgewise midpoint refinement.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple

from config.settings import HASH_PREFIX_LENGTH
from geometry.linalg import Vector, affine_rank, barycentric, dot, hyperplane_through, to_vector
from utils.errors import DegeneratePolytope, PointNotInterior

logger = logging.getLogger(__name__)

Face = Tuple[int, ...]


@dataclass(frozen=True)
class Wall:
    """Interior (n-1)-face shared by two simplices"""

    face: Face
    left: int
    right: int


@dataclass(frozen=True, eq=False)
class Triangulation:
    points: Tuple[Vector, ...]
    simplices: Tuple[Tuple[int, ...], ...]
    interior_walls: Tuple[Wall, ...]
    boundary_simplices: Dict[int, Tuple[Face, ...]]
    polytope: object = field(repr=False)
    refinement: int = 0

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def simplex_points(self) -> List[List[Vector]]:
        return [[self.points[i] for i in s] for s in self.simplices]

    def total_volume(self) -> Fraction:
        from geometry.polytope import simplex_volume
        return sum((simplex_volume(s) for s in self.simplex_points()), Fraction(0))

    def boundary_faces(self):
        """Yield (facet index, face point list) for every boundary (n-1)-simplex"""
        for facet_index in sorted(self.boundary_simplices):
            for face in self.boundary_simplices[facet_index]:
                yield facet_index, [self.points[i] for i in face]

    def locate(self, point: Sequence) -> Optional[Tuple[int, Vector]]:
        """First simplex (in triangulation order) containing the point, with barycentric coordinates"""
        point = to_vector(point)
        for index, simplex in enumerate(self.simplex_points()):
            coords = barycentric(simplex, point)
            if coords is not None and all(c >= 0 for c in coords):
                return index, coords
        return None

    @cached_property
    def _lookup(self) -> Dict[Vector, int]:
        return {p: i for i, p in enumerate(self.points)}

    def point_index(self, point: Sequence) -> Optional[int]:
        return self._lookup.get(to_vector(point))

    @property
    def triangulation_id(self) -> str:
        digest = hashlib.sha256()
        for p in self.points:
            digest.update((",".join(str(x) for x in p) + ";").encode())
        for s in self.simplices:
            digest.update((",".join(str(i) for i in s) + "|").encode())
        return digest.hexdigest()[:HASH_PREFIX_LENGTH]

    def __repr__(self):
        return (f"Triangulation(points={len(self.points)}, simplices={len(self.simplices)}, "
                f"walls={len(self.interior_walls)}, refinement={self.refinement})")


def placing_triangulation(points: Sequence[Vector]) -> List[Tuple[int, ...]]:
    """
    Placing triangulation of a point set in lexicographic order.

    Points inside the hull of earlier points are skipped, so for a vertex
    set every point ends up used.
    """
    n = len(points[0])
    order = sorted(range(len(points)), key=lambda i: points[i])
    chosen: List[int] = []
    for i in order:
        if affine_rank([points[j] for j in chosen + [i]]) == len(chosen):
            chosen.append(i)
        if len(chosen) == n + 1:
            break
    if len(chosen) < n + 1:
        raise DegeneratePolytope("points do not span a full-dimensional simplex")

    simplices = [tuple(sorted(chosen))]
    owners: Dict[Face, List[int]] = {}
    planes: Dict[Face, Tuple] = {}

    def register(simplex_index):
        simplex = simplices[simplex_index]
        for k in range(len(simplex)):
            face = simplex[:k] + simplex[k + 1:]
            owners.setdefault(face, []).append(simplex_index)

    register(0)
    used = set(chosen)
    for i in order:
        if i in used:
            continue
        p = points[i]
        visible = []
        for face, face_owners in owners.items():
            if len(face_owners) != 1:
                continue
            if face not in planes:
                planes[face] = hyperplane_through([points[j] for j in face])
            normal, offset = planes[face]
            opposite = next(j for j in simplices[face_owners[0]] if j not in face)
            hp = dot(normal, p) + offset
            hq = dot(normal, points[opposite]) + offset
            if hp != 0 and (hp > 0) != (hq > 0):
                visible.append(face)
        for face in visible:
            simplices.append(tuple(sorted(face + (i,))))
            register(len(simplices) - 1)
        if visible:
            used.add(i)
    return simplices


def _assemble(points, simplices, polytope, refinement) -> Triangulation:
    owners: Dict[Face, List[int]] = {}
    for index, simplex in enumerate(simplices):
        for k in range(len(simplex)):
            owners.setdefault(simplex[:k] + simplex[k + 1:], []).append(index)
    walls = []
    boundary: Dict[int, List[Face]] = {}
    facets = list(polytope.halfspaces) if polytope is not None else []
    for face, face_owners in owners.items():
        if len(face_owners) == 2:
            walls.append(Wall(face, face_owners[0], face_owners[1]))
        elif len(face_owners) == 1 and facets:
            for facet_index, (u, a) in enumerate(facets):
                if all(dot(u, points[j]) + a == 0 for j in face):
                    boundary.setdefault(facet_index, []).append(face)
                    break
    return Triangulation(
        points=tuple(points),
        simplices=tuple(simplices),
        interior_walls=tuple(walls),
        boundary_simplices={k: tuple(v) for k, v in sorted(boundary.items())},
        polytope=polytope,
        refinement=refinement,
    )


def _kuhn_pattern(n: int) -> List[List[Tuple[int, int]]]:
    """
    Subsimplices of the 2-fold edgewise subdivision of the path simplex
    1 >= x_1 >= ... >= x_n >= 0, as (a, b) vertex-index pairs meaning the
    midpoint of v_a and v_b.
    """
    pattern = []
    for corner in product((0, 1), repeat=n):
        for order in permutations(range(n)):
            path = [list(corner)]
            for axis in order:
                step = list(path[-1])
                step[axis] += 1
                path.append(step)
            if not all(2 >= x[0] and all(x[i] >= x[i + 1] for i in range(n - 1)) and x[-1] >= 0
                       for x in path):
                continue
            vertices = []
            for x in path:
                ones = sum(1 for c in x if c == 2)
                halves = sum(1 for c in x if c == 1)
                vertices.append((ones, ones + halves))
            pattern.append(vertices)
    return pattern


def refine(T: Triangulation) -> Triangulation:
    """One uniform edge-midpoint subdivision of every simplex (2^n children each)"""
    pattern = _kuhn_pattern(T.dim)
    points = list(T.points)
    index = {p: i for i, p in enumerate(points)}

    def midpoint(i, j):
        if i == j:
            return i
        p = tuple((x + y) / 2 for x, y in zip(points[i], points[j]))
        if p not in index:
            index[p] = len(points)
            points.append(p)
        return index[p]

    simplices = []
    for simplex in T.simplices:
        ordered = sorted(simplex)
        for child in pattern:
            simplices.append(tuple(sorted(midpoint(ordered[a], ordered[b]) for a, b in child)))
    return _assemble(points, simplices, T.polytope, T.refinement + 1)


def star(T: Triangulation, point: Sequence) -> Triangulation:
    """Stellar subdivision inserting a point of the polytope as a new vertex"""
    point = to_vector(point)
    if point in T.points:
        return T
    if T.polytope is not None and not T.polytope.contains(point):
        raise PointNotInterior(f"point {point} is outside the polytope")
    points = list(T.points) + [point]
    new_index = len(points) - 1
    simplices = []
    for simplex, simplex_pts in zip(T.simplices, T.simplex_points()):
        coords = barycentric(simplex_pts, point)
        if coords is None or any(c < 0 for c in coords):
            simplices.append(simplex)
            continue
        for k, c in enumerate(coords):
            if c > 0:
                child = simplex[:k] + (new_index,) + simplex[k + 1:]
                simplices.append(tuple(sorted(child)))
    return _assemble(points, simplices, T.polytope, T.refinement)


def triangulate(P, refinement: int = 0, y0: Optional[Sequence] = None) -> Triangulation:
    """
    Triangulate a polytope.

    Args:
        P: Polytope
        refinement: number of uniform midpoint refinements k
        y0: optional point inserted by stellar subdivision before refining, so
            it is a vertex at every refinement level

    Returns:
        Triangulation with interior walls and per-facet boundary simplices
    """
    if refinement < 0:
        raise ValueError("refinement must be nonnegative")
    points = list(P.vertices)
    T = _assemble(points, placing_triangulation(points), P, 0)
    if y0 is not None:
        T = star(T, y0)
    for _ in range(refinement):
        T = refine(T)
    logger.debug(f"Triangulated {P!r}: {T!r}")
    return T


def clip_simplex(simplex: Sequence[Vector], normal: Sequence, offset) -> List[List[Vector]]:
    """Triangulation of simplex ∩ {<normal, y> + offset >= 0}; empty when the part has no volume"""
    n = len(simplex[0])
    values = [dot(normal, p) + offset for p in simplex]
    if all(v >= 0 for v in values):
        return [list(simplex)]
    if all(v <= 0 for v in values):
        return []
    kept = {p for p, v in zip(simplex, values) if v >= 0}
    for i in range(len(simplex)):
        for j in range(i + 1, len(simplex)):
            vi, vj = values[i], values[j]
            if (vi > 0 > vj) or (vi < 0 < vj):
                t = vi / (vi - vj)
                kept.add(tuple(a + t * (b - a) for a, b in zip(simplex[i], simplex[j])))
    kept = sorted(kept)
    if affine_rank(kept) < n:
        return []
    return [[kept[i] for i in s] for s in placing_triangulation(kept)]


def triangulation_from_simplices(polytope, simplices: Sequence[Sequence[Vector]], refinement: int = 0) -> Triangulation:
    """Assemble a triangulation from explicit simplex coordinates (points are merged)"""
    points: List[Vector] = []
    index: Dict[Vector, int] = {}
    indexed = []
    for simplex in simplices:
        ids = []
        for p in simplex:
            p = to_vector(p)
            if p not in index:
                index[p] = len(points)
                points.append(p)
            ids.append(index[p])
        indexed.append(tuple(sorted(ids)))
    return _assemble(points, indexed, polytope, refinement)
