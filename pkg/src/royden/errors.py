"""Domain errors raised across the package.

Every error that reflects bad input data or an unsatisfiable request derives
from RoydenError so callers (and the CLI) can distinguish domain failures
from programming bugs.
"""

from __future__ import annotations


class RoydenError(Exception):
    """Base class for all domain errors."""


# ---------------------------------------------------------------------------
# graph construction and file format

class NegativeWeight(RoydenError):
    """An edge weight was zero or negative."""


class SelfLoop(RoydenError):
    """An edge connects a vertex to itself."""


class NonPositiveMeasure(RoydenError):
    """A vertex measure entry was zero or negative."""


class DuplicateEdgeConflict(RoydenError):
    """The same vertex pair appeared twice with different weights."""


class SizeOverflow(RoydenError):
    """A construction would exceed the configured vertex cap."""


class GraphSyntaxError(RoydenError):
    """A graph or function file failed to parse."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


# ---------------------------------------------------------------------------
# binding and lookup

class SectionMismatch(RoydenError):
    """A vertex function was used with a section it is not bound to."""


class UnknownVertex(RoydenError):
    """A vertex index or label does not exist in the section."""


class SameVertex(RoydenError):
    """An operation requires two distinct vertices."""


class DisconnectedPair(RoydenError):
    """Two vertices lie in different connected components."""


class InvalidParameter(RoydenError):
    """A parameter violates a stated precondition."""


# ---------------------------------------------------------------------------
# potential theory and harmonic problems

class UngroundedComponent(RoydenError):
    """An interior component touches no masked vertex and carries no killing
    term, so the requested problem has no unique solution."""


class MissingBoundaryValue(RoydenError):
    """A Dirichlet problem was posed without a value on some masked vertex."""


class MonotonicityViolation(RoydenError):
    """A quantity that must be monotone along an exhaustion was not."""


class NotHarmonic(RoydenError):
    """The supplied function is not harmonic on the interior."""


# ---------------------------------------------------------------------------
# numerics

class NoConvergence(RoydenError):
    """An iterative solver hit its iteration budget before converging."""

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class SingularOperator(RoydenError):
    """The operator is singular or indefinite on the requested subspace."""


class DimensionCap(RoydenError):
    """A dense computation was requested above the configured size cap."""


class EmptyInterior(RoydenError):
    """Every vertex of the section is masked."""


class NegativeTime(RoydenError):
    """A semigroup operation received t < 0."""


# ---------------------------------------------------------------------------
# random walk oracle

class KillingUnsupported(RoydenError):
    """The walk oracle only handles sections with identically zero killing."""


class UnmaskedSection(RoydenError):
    """The walk oracle needs a reachable nonempty Dirichlet mask."""
