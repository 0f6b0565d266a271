"""
Dense two-phase simplex method with Bland's anti-cycling rule.

Solves  minimize c.x  subject to  a_i.x (<=|>=|==) b_i,  x >= 0.
When every coefficient is an int or Fraction the tableau is kept in exact
rational arithmetic and the optimum is exact; otherwise floats with a
pivot tolerance are used.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from config.settings import LP_FLOAT_TOLERANCE

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 200000


class LPStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LinearConstraint:
    coefficients: Tuple
    sense: str
    rhs: object

    def __post_init__(self):
        if self.sense not in ("<=", ">=", "=="):
            raise ValueError(f"Invalid constraint sense: {self.sense}")


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    point: Optional[Tuple]
    value: Optional[object]
    iterations: int = 0
    exact: bool = True


def _is_exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


class SimplexTableau:
    """Tableau with the reduced-cost row stored alongside the constraint rows"""

    def __init__(self, rows, rhs, basis, exact, tolerance):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.exact = exact
        self.eps = 0 if exact else tolerance
        self.cost: List = []
        self.value = 0
        self.iterations = 0

    def set_objective(self, costs, allowed):
        """Install an objective and price out the current basis"""
        self.allowed = allowed
        self.cost = list(costs)
        self.value = 0 * costs[0] if costs else 0
        for i, b in enumerate(self.basis):
            cb = costs[b]
            if cb != 0:
                row = self.rows[i]
                self.cost = [c - cb * a for c, a in zip(self.cost, row)]
                self.value -= cb * self.rhs[i]

    def pivot(self, i, j):
        row = self.rows[i]
        p = row[j]
        row = [a / p for a in row]
        self.rows[i] = row
        self.rhs[i] = self.rhs[i] / p
        for k in range(len(self.rows)):
            if k == i:
                continue
            f = self.rows[k][j]
            if f != 0:
                self.rows[k] = [a - f * b for a, b in zip(self.rows[k], row)]
                self.rhs[k] = self.rhs[k] - f * self.rhs[i]
        f = self.cost[j]
        if f != 0:
            self.cost = [a - f * b for a, b in zip(self.cost, row)]
            self.value = self.value - f * self.rhs[i]
        self.basis[i] = j
        self.iterations += 1

    def run(self) -> LPStatus:
        """Bland's rule: lowest-index entering column, lowest-index leaving basic variable"""
        while True:
            if self.iterations > MAX_ITERATIONS:
                raise RuntimeError("simplex iteration limit exceeded")
            entering = next((j for j in self.allowed if self.cost[j] < -self.eps), None)
            if entering is None:
                return LPStatus.OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > self.eps:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return LPStatus.UNBOUNDED
            self.pivot(best[1], entering)

    def objective_value(self):
        return -self.value


def lp_solve(objective: Sequence, constraints: Sequence[LinearConstraint],
             tolerance: float = LP_FLOAT_TOLERANCE) -> LPResult:
    """
    Minimize objective.x over x >= 0 subject to linear constraints.

    Args:
        objective: cost vector c
        constraints: LinearConstraint rows
        tolerance: pivot tolerance on the float path

    Returns:
        LPResult; infeasible and unbounded problems are reported by status
    """
    n = len(objective)
    values = list(objective)
    for con in constraints:
        if len(con.coefficients) != n:
            raise ValueError("constraint length does not match objective length")
        values.extend(con.coefficients)
        values.append(con.rhs)
    exact = _is_exact(values)
    convert = Fraction if exact else float
    zero, one = convert(0), convert(1)

    # Normalize to nonnegative right-hand sides
    normalized = []
    for con in constraints:
        a = [convert(x) for x in con.coefficients]
        b = convert(con.rhs)
        sense = con.sense
        if b < 0:
            a = [-x for x in a]
            b = -b
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        normalized.append((a, sense, b))

    m = len(normalized)
    n_slack = sum(1 for _, s, _ in normalized if s != "==")
    n_art = sum(1 for _, s, _ in normalized if s != "<=")
    width = n + n_slack + n_art
    rows, rhs, basis = [], [], []
    slack_col, art_col = n, n + n_slack
    artificials = []
    for a, sense, b in normalized:
        row = a + [zero] * (n_slack + n_art)
        if sense == "<=":
            row[slack_col] = one
            basis.append(slack_col)
            slack_col += 1
        else:
            if sense == ">=":
                row[slack_col] = -one
                slack_col += 1
            row[art_col] = one
            basis.append(art_col)
            artificials.append(art_col)
            art_col += 1
        rows.append(row)
        rhs.append(b)

    tableau = SimplexTableau(rows, rhs, basis, exact, tolerance)
    real_columns = list(range(n + n_slack))

    if artificials:
        phase_one = [zero] * width
        for c in artificials:
            phase_one[c] = one
        tableau.set_objective(phase_one, list(range(width)))
        tableau.run()
        infeasibility = tableau.objective_value()
        if infeasibility > (0 if exact else tolerance * max(1.0, m)):
            logger.debug(f"LP infeasible after phase one (residual {infeasibility})")
            return LPResult(LPStatus.INFEASIBLE, None, None, tableau.iterations, exact)
        # Drive artificial variables out of the basis; drop redundant rows
        art_set = set(artificials)
        i = 0
        while i < len(tableau.rows):
            if tableau.basis[i] in art_set:
                j = next((c for c in real_columns if abs(tableau.rows[i][c]) > tableau.eps), None)
                if j is None:
                    del tableau.rows[i]
                    del tableau.rhs[i]
                    del tableau.basis[i]
                    continue
                tableau.pivot(i, j)
            i += 1

    costs = [convert(c) for c in objective] + [zero] * (n_slack + n_art)
    tableau.set_objective(costs, real_columns)
    status = tableau.run()
    if status == LPStatus.UNBOUNDED:
        return LPResult(LPStatus.UNBOUNDED, None, None, tableau.iterations, exact)

    point = [zero] * n
    for i, b in enumerate(tableau.basis):
        if b < n:
            point[b] = tableau.rhs[i]
    value = sum((convert(c) * x for c, x in zip(objective, point)), zero)
    logger.debug(f"LP optimal after {tableau.iterations} pivots, value {value}")
    return LPResult(LPStatus.OPTIMAL, tuple(point), value, tableau.iterations, exact)
