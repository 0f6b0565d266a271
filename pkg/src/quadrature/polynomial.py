"""
Weight functions on polytopes: exact multivariate polynomials and
sampled-smooth weights evaluated through quadrature.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import DEFAULT_QUADRATURE_DEGREE, MIN_QUADRATURE_DEGREE, SMOOTH_WEIGHT_TABLE
from geometry.linalg import to_fraction

Exponent = Tuple[int, ...]


class Polynomial:
    """Polynomial in n variables with exact rational coefficients"""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Optional[Dict[Exponent, object]] = None):
        self.dim = dim
        cleaned = {}
        for exponent, coeff in (terms or {}).items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != dim or any(e < 0 for e in exponent):
                raise ValueError(f"invalid exponent {exponent} for dimension {dim}")
            coeff = to_fraction(coeff)
            if coeff != 0:
                cleaned[exponent] = cleaned.get(exponent, Fraction(0)) + coeff
                if cleaned[exponent] == 0:
                    del cleaned[exponent]
        self.terms = cleaned

    @classmethod
    def constant(cls, dim: int, value=1) -> "Polynomial":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim: int, index: int) -> "Polynomial":
        exponent = [0] * dim
        exponent[index] = 1
        return cls(dim, {tuple(exponent): 1})

    @classmethod
    def from_affine(cls, gradient: Sequence, constant) -> "Polynomial":
        dim = len(gradient)
        terms = {(0,) * dim: constant}
        for i, g in enumerate(gradient):
            exponent = [0] * dim
            exponent[i] = 1
            terms[tuple(exponent)] = g
        return cls(dim, terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def partial(self, index: int) -> "Polynomial":
        """Derivative with respect to y_index"""
        terms = {}
        for exponent, coeff in self.terms.items():
            if exponent[index]:
                lowered = exponent[:index] + (exponent[index] - 1,) + exponent[index + 1:]
                terms[lowered] = coeff * exponent[index]
        return Polynomial(self.dim, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.dim != self.dim:
                raise ValueError("dimension mismatch")
            return other
        return Polynomial.constant(self.dim, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Polynomial(self.dim, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, SmoothWeight):
            return other * self
        if not isinstance(other, Polynomial):
            factor = to_fraction(other)
            return Polynomial(self.dim, {e: c * factor for e, c in self.terms.items()})
        other = self._coerce(other)
        terms: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.dim, terms)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        result = Polynomial.constant(self.dim, 1)
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __call__(self, point: Sequence):
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        """Exact when point entries are rational, float otherwise"""
        total = Fraction(0)
        for exponent, coeff in self.terms.items():
            term = coeff
            for x, e in zip(point, exponent):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        values = np.zeros(points.shape[0])
        for exponent, coeff in self.terms.items():
            values += float(coeff) * np.prod(points ** np.asarray(exponent), axis=1)
        return values

    def substitute(self, forms: Sequence["Polynomial"]) -> "Polynomial":
        """Compose with y_j = forms[j]; the result lives in the forms' variables"""
        target = forms[0].dim
        powers: Dict[Tuple[int, int], Polynomial] = {}

        def power(j, e):
            if (j, e) not in powers:
                powers[(j, e)] = Polynomial.constant(target, 1) if e == 0 else power(j, e - 1) * forms[j]
            return powers[(j, e)]

        result = Polynomial(target)
        for exponent, coeff in self.terms.items():
            term = Polynomial.constant(target, coeff)
            for j, e in enumerate(exponent):
                if e:
                    term = term * power(j, e)
            result = result + term
        return result

    def to_dict(self) -> Dict:
        from geometry.polytope import format_rational
        return {
            "dim": self.dim,
            "terms": [{"exponents": list(e), "coeff": format_rational(c)}
                      for e, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Polynomial":
        dim = int(data["dim"])
        terms: Dict[Exponent, Fraction] = {}
        for term in data.get("terms", []):
            e = tuple(int(x) for x in term["exponents"])
            terms[e] = terms.get(e, Fraction(0)) + to_fraction(term["coeff"])
        return cls(dim, terms)

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        parts = []
        for exponent, coeff in sorted(self.terms.items()):
            monomial = "*".join(f"y{i + 1}^{e}" if e > 1 else f"y{i + 1}"
                                for i, e in enumerate(exponent) if e)
            parts.append(f"{coeff}*{monomial}" if monomial else f"{coeff}")
        return "Polynomial(" + " + ".join(parts) + ")"


@dataclass(frozen=True)
class SmoothWeight:
    """
    Black-box weight evaluated at quadrature nodes.

    The evaluator maps a (k, n) float array of points to k values.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    dim: int
    quadrature_degree: int = DEFAULT_QUADRATURE_DEGREE
    name: str = "custom"

    def __post_init__(self):
        if self.quadrature_degree < MIN_QUADRATURE_DEGREE:
            raise ValueError(f"quadrature_degree must be >= {MIN_QUADRATURE_DEGREE}")

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(points, dtype=float)), dtype=float)

    def evaluate(self, point: Sequence) -> float:
        return float(self.evaluate_many(np.asarray([[float(x) for x in point]]))[0])

    __call__ = evaluate

    def __mul__(self, other):
        if isinstance(other, SmoothWeight):
            f, g = self.evaluator, other.evaluator
            degree = max(self.quadrature_degree, other.quadrature_degree)
            return SmoothWeight(lambda pts: f(pts) * g(pts), self.dim, degree, f"{self.name}*{other.name}")
        if isinstance(other, Polynomial):
            f = self.evaluator
            degree = self.quadrature_degree + other.degree
            return SmoothWeight(lambda pts: f(pts) * other.evaluate_many(pts), self.dim, degree,
                                f"{self.name}*poly")
        factor = float(other)
        f = self.evaluator
        return SmoothWeight(lambda pts: factor * f(pts), self.dim, self.quadrature_degree, self.name)

    __rmul__ = __mul__

    def with_degree(self, degree: int) -> "SmoothWeight":
        return SmoothWeight(self.evaluator, self.dim, degree, self.name)


Weight = Union[Polynomial, SmoothWeight]


def smooth_weight_from_table(name: str, params: Sequence[float], dim: int,
                             quadrature_degree: int = DEFAULT_QUADRATURE_DEGREE) -> SmoothWeight:
    """Named built-in smooth weights (see SMOOTH_WEIGHT_TABLE in settings)"""
    params = [float(p) for p in params]
    if name == "exp_linear":
        if len(params) != dim + 1:
            raise ValueError(f"exp_linear needs {dim + 1} parameters")
        c0, c = params[0], np.asarray(params[1:])
        return SmoothWeight(lambda pts: np.exp(c0 + pts @ c), dim, quadrature_degree, name)
    if name == "gaussian":
        if len(params) != dim + 1:
            raise ValueError(f"gaussian needs {dim + 1} parameters")
        s, m = params[0], np.asarray(params[1:])
        return SmoothWeight(lambda pts: np.exp(-s * np.sum((pts - m) ** 2, axis=1)), dim,
                            quadrature_degree, name)
    raise ValueError(f"Unknown smooth weight '{name}'; available: {', '.join(SMOOTH_WEIGHT_TABLE)}")


def weight_from_dict(data: Dict, dim: Optional[int] = None) -> Weight:
    """Polynomial JSON, or {"smooth": name, "params": [...], "quadrature_degree": d}"""
    if "smooth" in data:
        d = int(data.get("dim", dim or 0))
        return smooth_weight_from_table(data["smooth"], data.get("params", []), d,
                                        int(data.get("quadrature_degree", DEFAULT_QUADRATURE_DEGREE)))
    weight = Polynomial.from_dict(data)
    if dim is not None and weight.dim != dim:
        raise ValueError(f"weight dimension {weight.dim} does not match polytope dimension {dim}")
    return weight


def is_exact(*weights) -> bool:
    return all(isinstance(w, Polynomial) for w in weights)
