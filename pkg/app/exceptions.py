"""
Domain Exceptions
Errors raised by the numerical services
"""
from typing import Optional


class SelfSimilarError(Exception):
    """Base class for every error raised by the solver stack"""


class ConfigurationError(SelfSimilarError, ValueError):
    """A discretization or run setting violates its invariants"""


class InvalidShapeError(SelfSimilarError):
    """The interface does not enclose the origin (nonpositive radius at a node)"""

    def __init__(self, message: str, column: Optional[int] = None):
        super().__init__(message)
        self.column = column


class SingularEvaluationError(SelfSimilarError):
    """A kernel was evaluated at coincident points"""


class DegenerateEigenvectorError(SelfSimilarError):
    """The G field vanishes, so the flux constant is undefined (circle)"""


class SingularJacobianError(SelfSimilarError):
    """The Newton system lost numerical rank"""


class LineSearchError(SelfSimilarError):
    """Backtracking exhausted without a decrease of the residual"""


class DomainError(SelfSimilarError, ValueError):
    """A closed-form formula was called outside its domain"""
