"""
Toric filtrations of PL convex functions and their weighted volumes.

At level m the filtration of the section ring restricted to the character
eta has successive minimum m * f(eta / m), so the weighted volume is
approximated by the lattice sum
    m^-(n+1) * sum_{eta in mP cap Z^n} v(eta/m) * m * f(eta/m)
which converges to int_P f v dy at rate O(1/m).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, factorial, floor
from typing import Iterator, List, Optional, Tuple

import numpy as np

from config.settings import LATTICE_CHUNK_SIZE, LATTICE_POINT_LIMIT, MAX_WORKERS
from geometry.linalg import lcm
from geometry.polytope import Polytope
from quadrature.integrate import integrate_pl_product, integrate_weight
from quadrature.polynomial import Polynomial, Weight
from stability.pl_functions import MaxOfAffine, PLConvexFunction
from utils.errors import LatticeTooLarge

logger = logging.getLogger(__name__)


def _coefficient_denominator(f: PLConvexFunction) -> int:
    rep = f.representation
    if isinstance(rep, MaxOfAffine):
        forms = rep.pieces
    else:
        forms = [rep.simplex_slope(i) for i in range(len(rep.triangulation.simplices))]
    denominator = 1
    for form in forms:
        for x in form.coefficients:
            denominator = lcm(denominator, Fraction(x).denominator)
    return denominator


@dataclass(frozen=True, eq=False)
class ToricFiltration:
    """
    Filtration induced by a rational PL convex function.

    denominator m0 clears every slope and constant of f, so the homogeneous
    extension m * m0 * f(eta / m) is an integer at each lattice point of mP.
    """

    f: PLConvexFunction
    denominator: int

    @classmethod
    def from_function(cls, f: PLConvexFunction) -> "ToricFiltration":
        return cls(f, _coefficient_denominator(f))

    @property
    def domain(self) -> Polytope:
        return self.f.domain

    def successive_minima(self, m: int, rounding: bool = False) -> List[Tuple[Tuple[int, ...], object]]:
        """(eta, m * f(eta/m)) for every eta in mP cap Z^n; floor of the value when rounding"""
        result = []
        for chunk in lattice_chunks(self.domain, m):
            for eta in chunk:
                eta = tuple(int(x) for x in eta)
                value = m * self.f.evaluate(tuple(Fraction(x, m) for x in eta))
                result.append((eta, Fraction(floor(value)) if rounding else value))
        return result

    def is_integral(self, m: Optional[int] = None) -> bool:
        m = m or self.denominator
        return all((self.denominator * value).denominator == 1 for _, value in self.successive_minima(m))


def _integer_halfspaces(P: Polytope, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Rows (A, b) with eta in mP  iff  A eta + b >= 0, all integers"""
    rows, offsets = [], []
    for u, a in P.halfspaces:
        scaled = m * a
        rows.append([scaled.denominator * x for x in u])
        offsets.append(scaled.numerator)
    return np.asarray(rows, dtype=np.int64), np.asarray(offsets, dtype=np.int64)


def lattice_box(P: Polytope, m: int) -> List[range]:
    ranges = []
    for i in range(P.dim):
        low = min(v[i] for v in P.vertices) * m
        high = max(v[i] for v in P.vertices) * m
        ranges.append(range(ceil(low), floor(high) + 1))
    return ranges


def lattice_chunks(P: Polytope, m: int, chunk_size: int = LATTICE_CHUNK_SIZE) -> Iterator[np.ndarray]:
    """
    Lattice points of mP as integer arrays of at most chunk_size rows, in
    lexicographic order.

    Raises:
        LatticeTooLarge: the bounding box holds more than LATTICE_POINT_LIMIT points
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    ranges = lattice_box(P, m)
    size = 1
    for r in ranges:
        size *= len(r)
    if size > LATTICE_POINT_LIMIT:
        raise LatticeTooLarge(f"bounding box of {m}P has {size} lattice points (limit {LATTICE_POINT_LIMIT})")
    A, b = _integer_halfspaces(P, m)
    iterator = product(*ranges)
    while True:
        block = [next(iterator, None) for _ in range(chunk_size)]
        block = [eta for eta in block if eta is not None]
        if not block:
            return
        points = np.asarray(block, dtype=np.int64)
        inside = np.all(points @ A.T + b >= 0, axis=1)
        yield points[inside]


def evaluate_on_lattice(f: PLConvexFunction, eta: np.ndarray, m: int) -> np.ndarray:
    """f(eta / m) as floats for an integer array of lattice points"""
    rep = f.representation
    if isinstance(rep, MaxOfAffine):
        points = eta / m
        values = [points @ np.asarray([float(g) for g in piece.gradient]) + float(piece.constant)
                  for piece in rep.pieces]
        return np.max(np.vstack(values), axis=0)
    return np.asarray([float(f.evaluate(tuple(Fraction(int(x), m) for x in p))) for p in eta.tolist()])


def _chunk_sum(f, v, m, points, rounding) -> float:
    y = points / m
    minima = m * evaluate_on_lattice(f, points, m)
    if rounding:
        minima = np.floor(minima + 1e-12)
    return float(np.sum(v.evaluate_many(y) * minima))


def _chunk_sum_exact(f, v, m, points, rounding) -> Fraction:
    total = Fraction(0)
    for eta in points.tolist():
        y = tuple(Fraction(int(x), m) for x in eta)
        minimum = m * f.evaluate(y)
        if rounding:
            minimum = Fraction(floor(minimum))
        total += v.evaluate(y) * minimum
    return total


def weighted_volume_exact(f: PLConvexFunction, v: Weight, P: Polytope, T=None, normalized: bool = False):
    """
    int_P f v dy, exact for polynomial v.

    Raises:
        TriangulationTooCoarse: T does not refine the linearity cells of f
    """
    T = T or P.base_triangulation
    value = integrate_pl_product(f, v, T)
    return value * normalization_prefactor(P, v) if normalized else value


def normalization_prefactor(P: Polytope, v: Weight):
    """1 / (n! int_P v dy), the Okounkov-body normalization of the weighted volume"""
    return 1 / (factorial(P.dim) * integrate_weight(v, P.base_triangulation))


def weighted_volume_lattice(f: PLConvexFunction, v: Weight, P: Polytope, m: int, exact: bool = False,
                            rounding: bool = False, normalized: bool = False,
                            max_workers: int = MAX_WORKERS):
    """
    Lattice approximation of the weighted volume at level m.

    Chunks are summed concurrently and reduced in chunk order. exact=True
    keeps rationals (polynomial v only).

    Raises:
        LatticeTooLarge
    """
    if exact and not isinstance(v, Polynomial):
        raise ValueError("exact lattice sums need a polynomial weight")
    chunks = list(lattice_chunks(P, m))
    worker = _chunk_sum_exact if exact else _chunk_sum
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        partials = list(executor.map(lambda points: worker(f, v, m, points, rounding), chunks))
    total = sum(partials, Fraction(0) if exact else 0.0)
    scale = Fraction(1, m ** (P.dim + 1)) if exact else 1.0 / m ** (P.dim + 1)
    value = total * scale
    logger.debug(f"Lattice volume at m={m}: {sum(len(c) for c in chunks)} points, value {float(value)}")
    if normalized:
        prefactor = normalization_prefactor(P, v)
        value = value * (prefactor if exact else float(prefactor))
    return value
