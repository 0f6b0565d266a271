"""
LP search for destabilizing PL convex functions.

Variables are the values z_p of f at the points of a triangulation T. The
objective L(f) is linear in z with coefficients given by hat-function
moments. Constraints:
    convexity across every interior wall,
    z_{y0} = 0 and z >= 0,
    int_{dP} f d(sigma) = 1.
The optimum delta is an upper bound for the stability threshold on the
subcone of functions subordinate to T.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from config.settings import DEFAULT_REFINEMENT, FLOAT_TOLERANCE, MAX_REFINEMENT, ONE_SIDED_CAVEAT
from extremal.solver import ExtremalSolution, LogConcavity, check_log_concave, solve_extremal
from geometry.linalg import barycentric, to_fraction, to_vector
from geometry.polytope import Polytope, format_rational
from geometry.triangulation import Triangulation, triangulate
from optimization.lp import LinearConstraint, LPStatus, lp_solve
from quadrature.integrate import integrate_pl_product, simplex_moments
from quadrature.polynomial import Polynomial, Weight
from stability.functional import evaluate_L
from stability.pl_functions import PLConvexFunction
from utils.errors import LPInfeasible, LPUnbounded, PointNotInterior

logger = logging.getLogger(__name__)


@dataclass
class StabilityReport:
    delta: object
    minimizer: Optional[PLConvexFunction]
    lp_status: LPStatus
    triangulation_id: str
    normalization_checks: Dict[str, object]
    y0: Tuple
    refinement: int
    exact: bool = True
    delta_check: object = None
    lp_iterations: int = 0
    trend: List[Tuple[int, object]] = field(default_factory=list)
    extremal: Optional[ExtremalSolution] = None
    log_concavity: Optional[LogConcavity] = None
    caveat: str = ONE_SIDED_CAVEAT

    @property
    def consistent(self) -> bool:
        """delta agrees with L re-evaluated on the minimizer, exactly or within FLOAT_TOLERANCE"""
        if self.delta is None or self.delta_check is None:
            return False
        if self.exact:
            return self.delta == self.delta_check
        gap = abs(float(self.delta) - float(self.delta_check))
        return gap <= FLOAT_TOLERANCE * max(1.0, abs(float(self.delta)))

    @property
    def destabilized(self) -> bool:
        return self.lp_status == LPStatus.OPTIMAL and self.delta < 0

    def to_dict(self) -> Dict:
        def fmt(x):
            if x is None:
                return None
            return format_rational(x) if isinstance(x, (int, Fraction)) else float(x)

        data = {
            "delta": fmt(self.delta),
            "delta_float": float(self.delta) if self.delta is not None else None,
            "lp_status": self.lp_status.value,
            "destabilized": self.destabilized,
            "triangulation_id": self.triangulation_id,
            "refinement": self.refinement,
            "y0": [format_rational(x) for x in self.y0],
            "normalization_checks": {k: fmt(v) for k, v in self.normalization_checks.items()},
            "delta_check": fmt(self.delta_check),
            "consistent": self.consistent,
            "exact": self.exact,
            "lp_iterations": self.lp_iterations,
            "trend": [{"refinement": k, "delta": fmt(d)} for k, d in self.trend],
            "caveat": self.caveat,
        }
        if self.minimizer is not None:
            data["minimizer"] = self.minimizer.to_dict()
        if self.extremal is not None:
            data["extremal"] = self.extremal.to_dict()
        if self.log_concavity is not None:
            data["v_log_concavity"] = self.log_concavity.to_dict()
        return data


def _objective(P: Polytope, v: Weight, w_eff: Weight, T: Triangulation, c) -> Tuple[List, List]:
    """LP objective coefficients of L and boundary normalization weights beta_p"""
    n_points = len(T.points)
    objective = [Fraction(0)] * n_points
    beta = [Fraction(0)] * n_points
    for simplex, points in zip(T.simplices, T.simplex_points()):
        _, moments = simplex_moments(w_eff, points)
        for i, m in zip(simplex, moments):
            objective[i] = objective[i] - c * m
    facets = P.facets
    point_index = {p: i for i, p in enumerate(T.points)}
    for facet_index, face in T.boundary_faces():
        measure = facets[facet_index].simplex_measure(face)
        _, moments = simplex_moments(v, face, measure)
        for p, m in zip(face, moments):
            i = point_index[p]
            objective[i] = objective[i] + 2 * m
            beta[i] += measure / len(face)
    return objective, beta


def _convexity_rows(T: Triangulation) -> List[LinearConstraint]:
    rows = []
    n_points = len(T.points)
    for wall in T.interior_walls:
        left = T.simplices[wall.left]
        q = next(i for i in T.simplices[wall.right] if i not in wall.face)
        mu = barycentric([T.points[i] for i in left], T.points[q])
        coefficients = [Fraction(0)] * n_points
        coefficients[q] += 1
        for i, m in zip(left, mu):
            coefficients[i] -= m
        rows.append(LinearConstraint(tuple(coefficients), ">=", 0))
    return rows


def search_destabilizer(P: Polytope, v: Weight, w_eff: Weight, T: Triangulation, y0: Sequence,
                        c=1) -> StabilityReport:
    """
    Minimize L over normalized PL convex functions subordinate to T.

    Args:
        P: polytope triangulated by T
        v, w_eff: boundary and effective region weights
        T: triangulation with y0 among its points
        y0: interior normalization point
        c: constant in front of the region term (1 for w_eff = w * l_ext)

    Raises:
        PointNotInterior: y0 not interior to P
        ValueError: y0 is not a point of T
        LPInfeasible / LPUnbounded: malformed LP
    """
    y0 = to_vector(y0)
    if not P.contains(y0, strict=True):
        raise PointNotInterior(f"y0 = {[format_rational(x) for x in y0]} is not interior to the polytope")
    anchor = T.point_index(y0)
    if anchor is None:
        raise ValueError("y0 must be a point of the triangulation; build it with triangulate(P, k, y0)")
    c = c if isinstance(c, float) else to_fraction(c)

    objective, beta = _objective(P, v, w_eff, T, c)
    n_points = len(T.points)
    constraints = _convexity_rows(T)
    pin = [0] * n_points
    pin[anchor] = 1
    constraints.append(LinearConstraint(tuple(pin), "==", 0))
    constraints.append(LinearConstraint(tuple(beta), "==", 1))
    logger.debug(f"Destabilizer LP: {n_points} variables, {len(constraints)} constraints")

    result = lp_solve(objective, constraints)
    if result.status == LPStatus.INFEASIBLE:
        raise LPInfeasible("normalized cone is empty for this triangulation")
    if result.status == LPStatus.UNBOUNDED:
        raise LPUnbounded("LP unbounded; the boundary normalization row is ineffective")

    f = PLConvexFunction.from_vertex_values(T, result.point)
    boundary_integral = integrate_pl_product(f, Polynomial.constant(P.dim, 1), T, boundary=True)
    checks = {
        "boundary_integral": boundary_integral,
        "value_at_y0": result.point[anchor],
        "min_value": min(result.point),
    }
    delta_check = evaluate_L(f, P, v, w_eff, c, T)
    if not result.exact:
        violations = f.convexity_violations(FLOAT_TOLERANCE)
        if violations or abs(boundary_integral - 1) > FLOAT_TOLERANCE:
            logger.warning(f"Float LP minimizer fails checks: {len(violations)} convexity violations")
    logger.info(f"Destabilizer LP optimal: delta={result.value} after {result.iterations} pivots")
    report = StabilityReport(
        delta=result.value,
        minimizer=f,
        lp_status=result.status,
        triangulation_id=T.triangulation_id,
        normalization_checks=checks,
        y0=y0,
        refinement=T.refinement,
        exact=result.exact,
        delta_check=delta_check,
        lp_iterations=result.iterations,
    )
    if not report.consistent:
        logger.warning(f"LP optimum {result.value} differs from L(minimizer) = {delta_check}")
    return report


def check_stability(P: Polytope, v: Weight, w: Weight, config=None) -> StabilityReport:
    """
    Full pipeline: l_ext, w_eff = w * l_ext, triangulate at level k around
    y0, LP search, and the delta trend at k and k + 1.

    config may be a RunConfig or None; refinement, y0 and trend are read from it.
    """
    refinement = getattr(config, "refinement", DEFAULT_REFINEMENT)
    y0 = getattr(config, "y0", None)
    with_trend = getattr(config, "trend", True)
    y0 = to_vector(y0) if y0 is not None else P.default_base_point()

    solution = solve_extremal(P, v, w)
    w_eff = w * solution.as_polynomial()
    logger.info(f"Extremal function: {[format_rational(b) for b in solution.ell.coefficients]}")

    T = triangulate(P, refinement, y0)
    report = search_destabilizer(P, v, w_eff, T, y0, c=1)
    report.extremal = solution
    report.log_concavity = check_log_concave(v, T)
    report.trend = [(refinement, report.delta)]
    if with_trend and refinement < MAX_REFINEMENT:
        finer = search_destabilizer(P, v, w_eff, triangulate(P, refinement + 1, y0), y0, c=1)
        report.trend.append((refinement + 1, finer.delta))
        if finer.delta > report.delta + (0 if report.exact else FLOAT_TOLERANCE):
            logger.warning(f"delta increased under refinement: {report.delta} -> {finer.delta}")
    return report
