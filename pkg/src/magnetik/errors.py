"""Exception hierarchy shared by every magnetik module."""


class MagnetikError(ValueError):
    """Base class for all engine errors."""


class DomainError(MagnetikError):
    """A point (or a finite-difference stencil around it) left the chart domain."""


class BaseMismatch(MagnetikError):
    pass


class DegenerateFrame(MagnetikError):
    pass


class NotUnit(MagnetikError):
    pass


class NotOrthogonal(MagnetikError):
    pass


class NotOrthonormal(MagnetikError):
    pass


class MetricSingular(MagnetikError):
    pass


class GramSingular(MagnetikError):
    pass


class DimensionError(MagnetikError):
    pass


class NotKilling(MagnetikError):
    pass


class NotStatic(MagnetikError):
    pass


class NotCodimensionOne(MagnetikError):
    pass


class NotAPrimitive(MagnetikError):
    pass


class BracketError(MagnetikError):
    pass


class DomainExit(MagnetikError):
    """Integration left the chart; ``trajectory`` holds the steps taken so far."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
