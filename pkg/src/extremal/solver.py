"""
Weighted extremal affine function.

l_ext is the unique affine function with
    2 int_{dP} xi v d(sigma) = int_P xi w l_ext dy
for every affine xi. Testing against the basis {1, y_1, ..., y_n} gives the
linear system M b = r with M_ij = int_P xi_i xi_j w dy.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular

from config.settings import (CONDITION_LIMIT, DEFAULT_QUADRATURE_DEGREE, FLOAT_TOLERANCE,
                             LIPSCHITZ_SLACK, LOG_CONCAVITY_STEP, LOG_CONCAVITY_TOLERANCE, MAX_WORKERS,
                             SOLVER_TOLERANCE)
from extremal.affine import AffineFunction
from geometry.linalg import determinant, solve, to_fraction
from geometry.polytope import Polytope, perturb
from geometry.triangulation import triangulate
from quadrature.integrate import quadrature_points, integrate_weight, integrate_weight_boundary
from quadrature.polynomial import Polynomial, Weight, is_exact
from utils.errors import NotPositiveDefinite, SingularSystem, ToricStabilityError

logger = logging.getLogger(__name__)


@dataclass
class ExtremalSolution:
    ell: AffineFunction
    gram: List[List]
    rhs: List
    residual: float
    min_eigenvalue_estimate: float
    exact: bool = True
    condition: Optional[float] = None
    sampling: str = ""

    def as_polynomial(self) -> Polynomial:
        return self.ell.as_polynomial()

    def to_dict(self):
        from geometry.polytope import format_rational

        def fmt(x):
            return format_rational(x) if isinstance(x, (int, Fraction)) else float(x)

        return {
            "ell": self.ell.to_dict(),
            "coefficients": [fmt(b) for b in self.ell.coefficients],
            "gram": [[fmt(x) for x in row] for row in self.gram],
            "rhs": [fmt(x) for x in self.rhs],
            "residual": self.residual,
            "min_eigenvalue_estimate": self.min_eigenvalue_estimate,
            "exact": self.exact,
            "condition": self.condition,
            "sampling": self.sampling,
        }


def _basis(dim: int) -> List[Polynomial]:
    return [Polynomial.constant(dim, 1)] + [Polynomial.variable(dim, i) for i in range(dim)]


def gram_matrix(P: Polytope, w: Weight, T=None) -> List[List]:
    """Symmetric (n+1)x(n+1) matrix of int_P xi_i xi_j w dy, exact for polynomial w"""
    T = T or P.base_triangulation
    basis = _basis(P.dim)
    size = len(basis)
    M = [[None] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            M[i][j] = M[j][i] = integrate_weight(w, T, basis[i] * basis[j])
    return M


def boundary_moment_vector(P: Polytope, v: Weight, T=None) -> List:
    """b_i = 2 int_{dP} xi_i v d(sigma)"""
    return [2 * integrate_weight_boundary(v, P, T, xi) for xi in _basis(P.dim)]


def c_constant(P: Polytope, v: Weight, w: Weight, T=None):
    """2 int_{dP} v d(sigma) / int_P w dy, and 1 when int_P w dy vanishes"""
    T = T or P.base_triangulation
    denominator = integrate_weight(w, T)
    numerator = 2 * integrate_weight_boundary(v, P, T)
    if isinstance(denominator, Fraction) and isinstance(numerator, Fraction):
        return Fraction(1) if denominator == 0 else numerator / denominator
    if abs(denominator) <= FLOAT_TOLERANCE:
        return 1.0
    return float(numerator) / float(denominator)


def check_positive(w: Weight, T, degree: int = DEFAULT_QUADRATURE_DEGREE) -> str:
    """
    Sample w at every vertex, simplex barycenter and quadrature node of T.

    Returns a description of the sampling basis.

    Raises:
        NotPositiveDefinite: w is not positive at some sample
    """
    n = T.dim
    for p in T.points:
        if w.evaluate(p) <= 0:
            raise NotPositiveDefinite(f"weight is not positive at vertex {[str(x) for x in p]}")
    nodes = 0
    for simplex in T.simplex_points():
        center = tuple(sum(c) / (n + 1) for c in zip(*simplex))
        if w.evaluate(center) <= 0:
            raise NotPositiveDefinite(f"weight is not positive at {[str(x) for x in center]}")
        _, _, points = quadrature_points(simplex, degree)
        values = w.evaluate_many(points)
        if np.any(values <= 0):
            bad = points[int(np.argmin(values))]
            raise NotPositiveDefinite(f"weight is not positive at quadrature node {bad.tolist()}")
        nodes += len(points)
    return (f"{len(T.points)} vertices, {len(T.simplices)} barycenters, "
            f"{nodes} quadrature nodes (degree {degree})")


@dataclass
class LogConcavity:
    log_concave: bool
    samples: int
    exact: bool
    witness: Optional[Tuple] = None

    def to_dict(self):
        from geometry.polytope import format_rational
        witness = None if self.witness is None else [
            format_rational(x) if isinstance(x, (int, Fraction)) else float(x) for x in self.witness]
        return {"log_concave": self.log_concave, "samples": self.samples, "exact": self.exact,
                "witness": witness}


def _sample_points(T) -> List[Tuple]:
    n = T.dim
    centers = [tuple(sum(c) / (n + 1) for c in zip(*simplex)) for simplex in T.simplex_points()]
    return list(T.points) + centers


def _log_hessian_exact(v: Polynomial, gradient, hessian, point):
    """-(v Hess v - grad v grad v^T) at point, or None where v <= 0"""
    value = v.evaluate(point)
    if value <= 0:
        return None
    g = [d.evaluate(point) for d in gradient]
    n = len(g)
    return [[g[i] * g[j] - value * hessian[i][j].evaluate(point) for j in range(n)] for i in range(n)]


def _is_psd(matrix) -> bool:
    n = len(matrix)
    for size in range(1, n + 1):
        for rows in combinations(range(n), size):
            if determinant([[matrix[i][j] for j in rows] for i in rows]) < 0:
                return False
    return True


def _log_hessian_float(v: Weight, point: np.ndarray, h: float) -> Optional[np.ndarray]:
    n = len(point)
    offsets = [np.zeros(n)] + [h * e for e in np.eye(n)]
    stencil = [point]
    for i in range(n):
        for j in range(n):
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                stencil.append(point + si * offsets[i + 1] + sj * offsets[j + 1])
    values = v.evaluate_many(np.asarray(stencil))
    if np.any(values <= 0):
        return None
    logs = np.log(values)[1:].reshape(n, n, 4)
    return (logs[:, :, 0] - logs[:, :, 1] - logs[:, :, 2] + logs[:, :, 3]) / (4 * h * h)


def check_log_concave(v: Weight, T) -> LogConcavity:
    """
    Test log-concavity of v at every vertex and simplex barycenter of T.

    Polynomial weights are tested exactly: v Hess v - grad v grad v^T must be
    negative semidefinite (all principal minors of its negative nonnegative).
    Smooth weights use central differences of log v.
    """
    points = _sample_points(T)
    if isinstance(v, Polynomial):
        gradient = [v.partial(i) for i in range(v.dim)]
        hessian = [[d.partial(j) for j in range(v.dim)] for d in gradient]
        for p in points:
            matrix = _log_hessian_exact(v, gradient, hessian, p)
            if matrix is None or not _is_psd(matrix):
                logger.info(f"Weight is not log-concave at {[str(x) for x in p]}")
                return LogConcavity(False, len(points), True, p)
        return LogConcavity(True, len(points), True)
    for p in points:
        x = np.asarray([float(c) for c in p])
        hessian = _log_hessian_float(v, x, LOG_CONCAVITY_STEP)
        if hessian is None or np.linalg.eigvalsh((hessian + hessian.T) / 2).max() > LOG_CONCAVITY_TOLERANCE:
            logger.info(f"Weight is not log-concave near {x.tolist()}")
            return LogConcavity(False, len(points), False, tuple(x.tolist()))
    return LogConcavity(True, len(points), False)


def _leading_minors(M) -> List[Fraction]:
    return [determinant([row[:k] for row in M[:k]]) for k in range(1, len(M) + 1)]


def _float_matrix(M) -> np.ndarray:
    return np.asarray([[float(x) for x in row] for row in M], dtype=float)


def solve_extremal(P: Polytope, v: Weight, w: Weight, T=None) -> ExtremalSolution:
    """
    Solve for l_ext.

    Exact rational elimination for polynomial v and w, with positive
    definiteness certified by leading principal minors; Cholesky
    factorization otherwise.

    Raises:
        NotPositiveDefinite: w not positive at a sample point, or M not positive definite
        SingularSystem: float path with condition number above CONDITION_LIMIT
    """
    T = T or P.base_triangulation
    degree = max(getattr(w, "quadrature_degree", DEFAULT_QUADRATURE_DEGREE), DEFAULT_QUADRATURE_DEGREE)
    sampling = check_positive(w, T, degree)
    M = gram_matrix(P, w, T)
    b = boundary_moment_vector(P, v, T)
    exact = is_exact(v, w)
    A = _float_matrix(M)
    eigenvalues = np.linalg.eigvalsh(A)
    condition = float(np.linalg.cond(A))

    if exact:
        minors = _leading_minors(M)
        if any(m <= 0 for m in minors):
            raise NotPositiveDefinite(f"Gram matrix has a nonpositive leading minor: {[str(m) for m in minors]}")
        coefficients = solve(M, b)
        if coefficients is None:
            raise SingularSystem("Gram matrix is singular")
        residual = max(abs(bi - sum((mij * cj for mij, cj in zip(row, coefficients)), Fraction(0)))
                       for row, bi in zip(M, b))
        residual = float(residual)
    else:
        try:
            L = cholesky(A, lower=True)
        except LinAlgError as e:
            raise NotPositiveDefinite(f"Gram matrix is not positive definite: {e}")
        if condition > CONDITION_LIMIT:
            raise SingularSystem(f"Gram matrix condition number {condition:.3e} exceeds {CONDITION_LIMIT:.0e}")
        rhs = np.asarray([float(x) for x in b])
        y = solve_triangular(L, rhs, lower=True)
        solution = solve_triangular(L.T, y, lower=False)
        residual = float(np.max(np.abs(rhs - A @ solution)))
        coefficients = [float(x) for x in solution]
        if residual > SOLVER_TOLERANCE * max(1.0, float(np.max(np.abs(rhs)))):
            logger.warning(f"Extremal residual {residual:.3e} above tolerance")

    ell = AffineFunction.from_coefficients(coefficients)
    logger.debug(f"Solved extremal function {[str(c) for c in ell.coefficients]} (exact={exact})")
    return ExtremalSolution(
        ell=ell,
        gram=M,
        rhs=b,
        residual=residual,
        min_eigenvalue_estimate=float(eigenvalues.min()),
        exact=exact,
        condition=condition,
        sampling=sampling,
    )


@dataclass
class FamilyEntry:
    eps: Fraction
    solution: Optional[ExtremalSolution] = None
    error: Optional[str] = None
    polytope: Optional[Polytope] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.solution is not None


def _solve_perturbed(P, extra, v, w, eps, refinement) -> FamilyEntry:
    try:
        P_eps = perturb(P, extra, eps)
        T = triangulate(P_eps, refinement)
        return FamilyEntry(eps, solve_extremal(P_eps, v, w, T), polytope=P_eps)
    except ToricStabilityError as e:
        logger.warning(f"Extremal solve failed at eps={eps}: {type(e).__name__}: {e}")
        return FamilyEntry(eps, error=type(e).__name__)


def extremal_family(P: Polytope, extra: Sequence[Tuple], v: Weight, w: Weight,
                    eps_list: Sequence, refinement: int = 0,
                    max_workers: int = MAX_WORKERS) -> List[FamilyEntry]:
    """
    Solve l_ext on each perturbation P_eps; the eps = 0 entry is always included.

    Per-entry failures are recorded on the entry and never abort the family.
    """
    values = sorted(set([Fraction(0)] + [to_fraction(e) for e in eps_list]))
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = [executor.submit(_solve_perturbed, P, extra, v, w, eps, refinement) for eps in values]
        entries = [f.result() for f in futures]
    logger.info(f"Extremal family: {sum(e.ok for e in entries)}/{len(entries)} solves succeeded")
    return entries


@dataclass
class LipschitzFit:
    constant: float
    distances: List[Tuple[Fraction, float]]
    verified: bool


def lipschitz_fit(family: Sequence[FamilyEntry], slack: float = LIPSCHITZ_SLACK) -> LipschitzFit:
    """
    Estimate C in |l_eps - l_0|_inf <= C eps from the two smallest positive eps
    and check the bound (times slack) on the remaining samples.
    """
    base = next((e for e in family if e.eps == 0 and e.ok), None)
    if base is None:
        raise ValueError("family has no successful eps = 0 entry")
    samples = sorted((e for e in family if e.eps > 0 and e.ok), key=lambda e: e.eps)
    if len(samples) < 3:
        raise ValueError("need at least three successful positive eps samples")
    distances = [(e.eps, float(e.solution.ell.distance(base.solution.ell))) for e in samples]
    constant = max(d / float(eps) for eps, d in distances[:2])
    verified = all(d <= slack * constant * float(eps) + FLOAT_TOLERANCE for eps, d in distances[2:])
    return LipschitzFit(constant, distances, verified)
