"""
Affine functions b0 + <b, y> on R^n
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence, Tuple

from geometry.linalg import dot, to_fraction, to_vector
from quadrature.polynomial import Polynomial


@dataclass(frozen=True)
class AffineFunction:
    constant: Fraction
    gradient: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "constant", to_fraction(self.constant))
        object.__setattr__(self, "gradient", to_vector(self.gradient))

    @classmethod
    def from_coefficients(cls, coefficients: Sequence) -> "AffineFunction":
        """(b0, b1, ..., bn)"""
        return cls(coefficients[0], tuple(coefficients[1:]))

    @classmethod
    def parse(cls, text: str) -> "AffineFunction":
        """Comma separated "b0,b1,...,bn" as accepted on the command line"""
        return cls.from_coefficients([to_fraction(x) for x in text.split(",") if x.strip()])

    @property
    def dim(self) -> int:
        return len(self.gradient)

    @property
    def coefficients(self) -> Tuple[Fraction, ...]:
        return (self.constant,) + self.gradient

    def evaluate(self, point: Sequence):
        return self.constant + dot(self.gradient, point)

    __call__ = evaluate

    def as_polynomial(self) -> Polynomial:
        return Polynomial.from_affine(self.gradient, self.constant)

    def __add__(self, other: "AffineFunction") -> "AffineFunction":
        return AffineFunction(self.constant + other.constant,
                              tuple(a + b for a, b in zip(self.gradient, other.gradient)))

    def __sub__(self, other: "AffineFunction") -> "AffineFunction":
        return self + other.scale(-1)

    def scale(self, factor) -> "AffineFunction":
        factor = to_fraction(factor)
        return AffineFunction(self.constant * factor, tuple(g * factor for g in self.gradient))

    def distance(self, other: "AffineFunction") -> Fraction:
        """Max-norm distance between coefficient vectors"""
        return max(abs(a - b) for a, b in zip(self.coefficients, other.coefficients))

    def to_dict(self) -> Dict:
        from geometry.polytope import format_rational
        return {"constant": format_rational(self.constant),
                "gradient": [format_rational(g) for g in self.gradient]}

    @classmethod
    def from_dict(cls, data: Dict) -> "AffineFunction":
        return cls(to_fraction(data["constant"]), tuple(to_fraction(g) for g in data["gradient"]))
