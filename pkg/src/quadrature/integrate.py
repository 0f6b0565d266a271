"""
Integration over simplices, triangulated regions and the lattice-normalized
boundary.

Polynomial integrands are integrated exactly: the integrand is pulled back
to barycentric coordinates and each monomial lambda^beta is integrated with
    int_S lambda^beta = k! |S| prod(beta_i!) / (|beta| + k)!
Smooth weights use a Grundmann-Moeller rule of the requested degree.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import DEFAULT_QUADRATURE_DEGREE, FLOAT_TOLERANCE
from geometry.linalg import Vector
from geometry.polytope import simplex_volume
from quadrature.polynomial import Polynomial, SmoothWeight, Weight
from utils.errors import DegenerateSimplex, TriangulationTooCoarse

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Exact kernels
# ---------------------------------------------------------------------------

def _pullback(g: Polynomial, simplex: Sequence[Vector]) -> Polynomial:
    """g(sum_i lambda_i p_i) as a polynomial in the k+1 barycentric coordinates"""
    k1 = len(simplex)
    forms = []
    for j in range(g.dim):
        terms = {}
        for i, p in enumerate(simplex):
            e = [0] * k1
            e[i] = 1
            terms[tuple(e)] = p[j]
        forms.append(Polynomial(k1, terms))
    return g.substitute(forms)


def _dirichlet(exponent: Sequence[int], k: int) -> Fraction:
    numerator = 1
    for b in exponent:
        numerator *= factorial(b)
    return Fraction(numerator * factorial(k), factorial(sum(exponent) + k))


def _barycentric_average(G: Polynomial, k: int) -> Fraction:
    """Integral of G over a k-simplex divided by the simplex measure"""
    return sum((c * _dirichlet(e, k) for e, c in G.terms.items()), Fraction(0))


def integrate_monomial_simplex(alpha: Sequence[int], simplex: Sequence[Vector]) -> Fraction:
    """Exact integral of y^alpha over an n-simplex"""
    n = len(alpha)
    return integrate_polynomial_simplex(Polynomial(n, {tuple(alpha): 1}), simplex)


def integrate_polynomial_simplex(g: Polynomial, simplex: Sequence[Vector],
                                 measure: Optional[Fraction] = None) -> Fraction:
    """
    Exact integral of g over a simplex.

    Args:
        g: polynomial integrand
        simplex: k+1 points; k = n for volume integrals, n-1 for facet pieces
        measure: the simplex measure; defaults to the n-volume

    Raises:
        DegenerateSimplex: zero measure
    """
    if measure is None:
        measure = simplex_volume(simplex)
    if measure == 0:
        raise DegenerateSimplex("simplex has zero measure")
    if g.is_zero():
        return Fraction(0)
    k = len(simplex) - 1
    return measure * _barycentric_average(_pullback(g, simplex), k)


def _hat_moments_exact(g: Polynomial, simplex: Sequence[Vector], measure: Fraction) -> Tuple[Fraction, List[Fraction]]:
    k = len(simplex) - 1
    G = _pullback(g, simplex)
    total = measure * _barycentric_average(G, k)
    moments = []
    for i in range(k + 1):
        moment = Fraction(0)
        for e, c in G.terms.items():
            shifted = list(e)
            shifted[i] += 1
            moment += c * _dirichlet(shifted, k)
        moments.append(measure * moment)
    return total, moments


# ---------------------------------------------------------------------------
# Grundmann-Moeller rules
# ---------------------------------------------------------------------------

def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to `total`, in lexicographic order"""
    for bars in combinations_with_replacement(range(parts), total):
        counts = [0] * parts
        for b in bars:
            counts[b] += 1
        yield tuple(counts)


@lru_cache(maxsize=None)
def grundmann_moeller(k: int, degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Grundmann-Moeller rule on the standard k-simplex.

    Returns (weights, barycentric nodes); weights sum to 1/k!. The rule is
    exact for polynomials of degree 2s+1 >= degree.
    """
    s = max(0, degree // 2)
    d = 2 * s + 1
    weights, nodes = [], []
    for i in range(s + 1):
        w = (-1) ** i * 2.0 ** (-2 * s) * (d + k - 2 * i) ** d / (factorial(i) * factorial(d + k - i))
        for beta in sorted(_compositions(s - i, k + 1)):
            nodes.append([(2 * b + 1) / (d + k - 2 * i) for b in beta])
            weights.append(w)
    return np.asarray(weights), np.asarray(nodes)


def rule_degree(degree: int) -> int:
    """Actual polynomial degree of the rule used for a requested degree"""
    return 2 * max(0, degree // 2) + 1


def quadrature_points(simplex: Sequence[Vector], degree: int):
    k = len(simplex) - 1
    weights, bary = grundmann_moeller(k, degree)
    vertices = np.asarray([[float(x) for x in p] for p in simplex])
    return weights * factorial(k), bary, bary @ vertices


def _hat_moments_smooth(g: SmoothWeight, simplex: Sequence[Vector], measure, degree: int):
    weights, bary, points = quadrature_points(simplex, degree)
    values = g.evaluate_many(points) * weights * float(measure)
    return float(values.sum()), [float((values * bary[:, i]).sum()) for i in range(bary.shape[1])]


# ---------------------------------------------------------------------------
# Public integration API
# ---------------------------------------------------------------------------

def simplex_moments(g: Weight, simplex: Sequence[Vector], measure=None, degree: Optional[int] = None):
    """
    Integral of g and of lambda_i * g over a simplex, lambda_i its barycentric hat functions.

    Exact Fractions for polynomial g, floats for smooth g.
    """
    if measure is None:
        measure = simplex_volume(simplex)
    if measure == 0:
        raise DegenerateSimplex("simplex has zero measure")
    if isinstance(g, Polynomial):
        return _hat_moments_exact(g, simplex, measure)
    return _hat_moments_smooth(g, simplex, measure, degree or g.quadrature_degree)


def integrate_polynomial_region(g: Polynomial, T) -> Fraction:
    """Exact integral of a polynomial over a triangulated region"""
    return sum((integrate_polynomial_simplex(g, s) for s in T.simplex_points()), Fraction(0))


def integrate_polynomial_boundary(g: Polynomial, P, T=None) -> Fraction:
    """
    Exact integral of g over the boundary against d(sigma).

    Each facet piece is integrated in barycentric coordinates and weighted by
    its d(sigma)-measure; in dimension one the facets are unit atoms.
    """
    T = T or P.base_triangulation
    facets = P.facets
    total = Fraction(0)
    for facet_index, face in T.boundary_faces():
        measure = facets[facet_index].simplex_measure(face)
        total += integrate_polynomial_simplex(g, face, measure)
    return total


def pl_vertex_values(f, simplex: Sequence[Vector]) -> List:
    """
    Values of a convex PL function at the vertices of a simplex (or face).

    A convex function is affine on a simplex exactly when its value at the
    barycenter is the mean of its vertex values.

    Raises:
        TriangulationTooCoarse: f is not affine on the simplex
    """
    values = [f.evaluate(p) for p in simplex]
    k = len(simplex)
    center = tuple(sum(c) / k for c in zip(*simplex))
    gap = f.evaluate(center) - sum(values, Fraction(0)) / k
    limit = 0 if all(isinstance(x, (int, Fraction)) for x in values) else FLOAT_TOLERANCE * (1 + max(abs(x) for x in values))
    if abs(gap) > limit:
        raise TriangulationTooCoarse("PL function is not affine on a simplex; refine or adapt the triangulation")
    return values


def integrate_smooth(g: Weight, T, degree: Optional[int] = None) -> float:
    """Quadrature of a weight over a triangulated region, summed in triangulation order"""
    degree = degree or getattr(g, "quadrature_degree", DEFAULT_QUADRATURE_DEGREE)
    total = 0.0
    for simplex in T.simplex_points():
        weights, _, points = quadrature_points(simplex, degree)
        total += float((g.evaluate_many(points) * weights).sum()) * float(simplex_volume(simplex))
    return total


def integrate_smooth_boundary(g: Weight, P, T=None, degree: Optional[int] = None) -> float:
    T = T or P.base_triangulation
    degree = degree or getattr(g, "quadrature_degree", DEFAULT_QUADRATURE_DEGREE)
    facets = P.facets
    total = 0.0
    for facet_index, face in T.boundary_faces():
        weights, _, points = quadrature_points(face, degree)
        total += float((g.evaluate_many(points) * weights).sum()) * float(facets[facet_index].simplex_measure(face))
    return total


def integrate_weight(g: Weight, T, factor: Optional[Polynomial] = None):
    """int_P factor * g dy: exact for polynomial g, quadrature otherwise"""
    weight = g if factor is None else g * factor
    if isinstance(weight, Polynomial):
        return integrate_polynomial_region(weight, T)
    return integrate_smooth(weight, T)


def integrate_weight_boundary(g: Weight, P, T=None, factor: Optional[Polynomial] = None):
    """int_{dP} factor * g d(sigma): exact for polynomial g, quadrature otherwise"""
    weight = g if factor is None else g * factor
    if isinstance(weight, Polynomial):
        return integrate_polynomial_boundary(weight, P, T)
    return integrate_smooth_boundary(weight, P, T)


def integrate_pl_product(f, g: Weight, T, boundary: bool = False):
    """
    Integral of f * g over the region, or over the boundary against d(sigma).

    On each simplex f = sum_i f(p_i) lambda_i, so the integral reduces to the
    hat moments of g; exact for polynomial g.

    Raises:
        TriangulationTooCoarse: f is not affine on some simplex of T
    """
    exact = isinstance(g, Polynomial)
    total = Fraction(0) if exact else 0.0
    if boundary:
        facets = T.polytope.facets
        pieces = ((face, facets[i].simplex_measure(face)) for i, face in T.boundary_faces())
    else:
        pieces = ((s, simplex_volume(s)) for s in T.simplex_points())
    for simplex, measure in pieces:
        values = pl_vertex_values(f, simplex)
        _, moments = simplex_moments(g, simplex, measure)
        if exact:
            total += sum((v * m for v, m in zip(values, moments)), Fraction(0))
        else:
            total += sum(float(v) * m for v, m in zip(values, moments))
    return total
