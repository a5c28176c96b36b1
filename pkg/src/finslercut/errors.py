"""Exception hierarchy shared by all finslercut modules."""


class FinslerError(Exception):
    """Base class for every error raised by this package."""


class ZeroVector(FinslerError, ValueError):
    pass


class OutsideChart(FinslerError, ValueError):
    pass


class OutsideDomain(FinslerError):
    """Geodesic left the chart before reaching the requested time."""


class NoConvergence(FinslerError):
    def __init__(self, message, residual=None):
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")
        self.residual = residual


class StepFailure(FinslerError):
    pass


class ZeroReference(FinslerError, ValueError):
    pass


class DegenerateFlag(FinslerError, ValueError):
    pass


class NotNormal(FinslerError, ValueError):
    pass


class NotC2(FinslerError):
    """Shape data requested at a point where the submanifold is only C^1."""


class NotSelfAdjoint(FinslerError, ValueError):
    pass


class Unreachable(FinslerError):
    pass


class OutOfBox(FinslerError, ValueError):
    pass


class SingularPoint(FinslerError, ValueError):
    pass


class EpsilonTooLarge(FinslerError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotPlanar(FinslerError, ValueError):
    pass


class RadiusBeyondInjectivity(FinslerError, ValueError):
    pass


class PoleCrossing(FinslerError, ValueError):
    pass


class RadiusTooLarge(FinslerError, ValueError):
    pass


class SchemaError(FinslerError, ValueError):
    """Scenario document rejected; ``field`` is the dotted path of the culprit."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class TaskError(FinslerError):
    def __init__(self, message, task=None):
        super().__init__(message)
        self.task = task
