"""
Exact rational linear algebra used by the geometry and quadrature code
"""

from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

Vector = Tuple[Fraction, ...]


def to_fraction(value) -> Fraction:
    """Convert int, Fraction, str ("p/q" or decimal) or float to a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        # decimal string keeps user-facing literals like 0.1 exact
        return Fraction(repr(value))
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def to_vector(values: Sequence) -> Vector:
    return tuple(to_fraction(v) for v in values)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def sub(a: Sequence, b: Sequence) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(a, b)


def primitive(normal: Sequence, offset) -> Tuple[Tuple[int, ...], Fraction]:
    """Scale (normal, offset) by a positive factor so the normal is a primitive integer vector"""
    normal = to_vector(normal)
    offset = to_fraction(offset)
    if all(x == 0 for x in normal):
        raise ValueError("normal vector must be nonzero")
    denominator = 1
    for x in normal:
        denominator = lcm(denominator, x.denominator)
    scaled = [int(x * denominator) for x in normal]
    g = 0
    for x in scaled:
        g = gcd(g, abs(x))
    factor = Fraction(denominator, g)
    return tuple(x // g for x in scaled), offset * factor


def row_reduce(matrix: List[List[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form; returns (rows, pivot columns)"""
    rows = [list(r) for r in matrix]
    if not rows:
        return rows, []
    n_cols = len(rows[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix: Sequence[Sequence]) -> int:
    return len(row_reduce([[to_fraction(x) for x in row] for row in matrix])[1])


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> Optional[Vector]:
    """Solve a square system exactly; None when singular"""
    n = len(matrix)
    augmented = [[to_fraction(x) for x in row] + [to_fraction(b)] for row, b in zip(matrix, rhs)]
    rows, pivots = row_reduce(augmented)
    if pivots[:n] != list(range(n)) or len(pivots) != n:
        return None
    return tuple(rows[i][n] for i in range(n))


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    rows = [[to_fraction(x) for x in row] for row in matrix]
    n = len(rows)
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        p = rows[c][c]
        det *= p
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] / p
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return det


def nullspace_vector(matrix: Sequence[Sequence]) -> Optional[Vector]:
    """A nonzero kernel vector of a matrix with one-dimensional kernel, else None"""
    rows, pivots = row_reduce([[to_fraction(x) for x in row] for row in matrix])
    n_cols = len(matrix[0])
    free = [c for c in range(n_cols) if c not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    vector = [Fraction(0)] * n_cols
    vector[f] = Fraction(1)
    for i, c in enumerate(pivots):
        vector[c] = -rows[i][f]
    return tuple(vector)


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine span of the points (-1 for no points)"""
    if not points:
        return -1
    base = points[0]
    return rank([sub(p, base) for p in points[1:]]) if len(points) > 1 else 0


def hyperplane_through(points: Sequence[Sequence]) -> Optional[Tuple[Vector, Fraction]]:
    """Affine function (normal, offset) vanishing on n affinely independent points in R^n"""
    vector = nullspace_vector([list(p) + [Fraction(1)] for p in points])
    if vector is None:
        return None
    normal, offset = vector[:-1], vector[-1]
    if all(x == 0 for x in normal):
        return None
    return normal, offset


def barycentric(simplex: Sequence[Sequence], point: Sequence) -> Optional[Vector]:
    """Barycentric coordinates of point with respect to an n-simplex"""
    n = len(point)
    matrix = [[simplex[j][i] for j in range(n + 1)] for i in range(n)]
    matrix.append([Fraction(1)] * (n + 1))
    return solve(matrix, list(point) + [Fraction(1)])


def affine_interpolant(simplex: Sequence[Sequence], values: Sequence) -> Tuple[Vector, Fraction]:
    """(gradient, constant) of the affine function taking the given values on the simplex vertices"""
    matrix = [list(p) + [Fraction(1)] for p in simplex]
    solution = solve(matrix, values)
    if solution is None:
        raise ValueError("simplex is degenerate")
    return solution[:-1], solution[-1]
