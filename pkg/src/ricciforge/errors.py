"""Exception types raised across the package."""


class RicciForgeError(Exception):
    """Base class for all errors raised by ricciforge."""


class PoleCoincidence(RicciForgeError, ValueError):
    """A point sits on (or numerically at) a pole or its antipode."""


class DomainError(RicciForgeError, ValueError):
    pass


class EmptySample(RicciForgeError):
    pass


class NonpositiveW(RicciForgeError, ValueError):
    pass


class NonpositiveF(RicciForgeError, ValueError):
    pass


class SingularMetric(RicciForgeError, ValueError):
    pass


class NotFound(RicciForgeError):
    """A parameter search ran past its cap without meeting its conditions."""


class QuadratureOverlap(RicciForgeError, ValueError):
    pass


class DisconnectedGraph(RicciForgeError):
    pass


class ModulusMismatch(RicciForgeError, ValueError):
    pass


class TooLarge(RicciForgeError, ValueError):
    pass


class ProfileTooLarge(RicciForgeError):
    pass


class Unsatisfiable(RicciForgeError):
    pass
