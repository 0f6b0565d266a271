"""
Exception hierarchy for the toric weighted K-stability toolkit
"""


class ToricStabilityError(Exception):
    """Base class for all toolkit errors"""


class PolytopeError(ToricStabilityError):
    """Invalid polytope input or construction"""


class UnboundedPolytope(PolytopeError):
    pass


class EmptyPolytope(PolytopeError):
    pass


class DegeneratePolytope(PolytopeError):
    pass


class InvalidPerturbation(PolytopeError):
    pass


class DegenerateSimplex(ToricStabilityError):
    pass


class TriangulationTooCoarse(ToricStabilityError):
    """A simplex is not contained in a single linearity domain"""


class NotPositiveDefinite(ToricStabilityError):
    pass


class SingularSystem(ToricStabilityError):
    pass


class PointNotInterior(ToricStabilityError):
    pass


class LPInfeasible(ToricStabilityError):
    pass


class LPUnbounded(ToricStabilityError):
    pass


class LatticeTooLarge(ToricStabilityError):
    pass


class InputValidationError(ToricStabilityError):
    """Raised when validation diagnostics block a run"""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []
