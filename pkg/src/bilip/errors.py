"""Exception types shared across the package.

Every failure a caller is expected to handle programmatically carries its
witness data as attributes rather than only in the message string.
"""
from __future__ import annotations


class BilipError(Exception):
    """Base class for all library errors."""


class InputError(BilipError):
    """Malformed or inconsistent input data (files, ids, parameters).

    CLI maps this to exit code 3.
    """


class PointNotOnGraph(InputError):
    """A point refers to a vertex or edge the graph does not contain."""


class EmptySampleSet(InputError):
    """An operation that averages/maximizes over samples got none."""


class NonpositiveRadius(InputError):
    """A radius that must be positive was zero or negative."""


class NonImmersedEdge(InputError):
    """An edge's image walk backtracks, so fibers are not discrete."""

    def __init__(self, edge: str, position: int):
        super().__init__(f"image walk of edge {edge!r} backtracks at slot {position}")
        self.edge = edge
        self.position = position


class NotLocallyInjective(BilipError):
    """Two points at definite distance map within tolerance of each other."""

    def __init__(self, p, q, distance: float, image_distance: float):
        super().__init__(
            f"points at distance {distance:.6g} map within {image_distance:.3g}"
        )
        self.p = p
        self.q = q
        self.distance = distance
        self.image_distance = image_distance


class LiftError(BilipError):
    """Base class for path-lifting failures."""


class StartMismatch(LiftError):
    """The supplied start point does not map to the path's start."""


class NoContinuation(LiftError):
    """The path leaves through a germ the map does not cover.

    The map fails to be a local homeomorphism onto a neighborhood at the
    stuck point; ``point`` is the last lifted position.
    """

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class EscapedDomain(LiftError):
    """The lift reached a boundary marker with path left to follow.

    ``partial`` holds the lift up to the marker, ``remaining`` the length of
    path not lifted.
    """

    def __init__(self, partial, remaining: float, marker):
        super().__init__(
            f"lift escaped at marker {marker!r} with {remaining:.6g} of path remaining"
        )
        self.partial = partial
        self.remaining = remaining
        self.marker = marker


class LiftCollision(LiftError):
    """Two distinct fiber points transported onto the same endpoint."""

    def __init__(self, message: str, a=None, b=None):
        super().__init__(message)
        self.a = a
        self.b = b


class NotNullHomotopic(BilipError):
    """A loop does not contract by spur moves; carries the reduced witness."""

    def __init__(self, witness):
        super().__init__("loop does not reduce to a constant walk")
        self.witness = witness


class MoveLiftFailure(LiftError):
    """An elementary homotopy move has no endpoint-preserving lift."""

    def __init__(self, message: str, move=None, before=None, after=None):
        super().__init__(message)
        self.move = move
        self.before = before
        self.after = after


class PrerequisiteMissing(BilipError):
    """A certified construction was requested without its prerequisites."""
