"""Exception types raised across the package."""


class AreaSignatureError(Exception):
    """Base class for all package errors."""


class NotSimple(AreaSignatureError):
    """Polygon edges intersect somewhere other than at shared vertices."""

    def __init__(self, message, edges=None):
        super().__init__(message)
        self.edges = edges


class Degenerate(AreaSignatureError):
    pass


class VertexCountMismatch(AreaSignatureError):
    pass


class TwoArcViolation(AreaSignatureError):
    """The circle does not cut the boundary in exactly two points."""

    def __init__(self, message, crossing_count=None):
        super().__init__(message)
        self.crossing_count = crossing_count


class NoSolution(AreaSignatureError):
    pass


class NotTCGLSource(AreaSignatureError):
    pass


class NoVerticesDetected(AreaSignatureError):
    pass


class AngleSolveFailed(AreaSignatureError):
    pass


class ClosureFailure(AreaSignatureError):
    pass


class FrameLoss(AreaSignatureError):
    pass


class VertexPoint(AreaSignatureError):
    pass


class SingularSystem(AreaSignatureError):
    pass
