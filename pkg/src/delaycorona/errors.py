"""Exception hierarchy shared by all analyses."""


class DelayCoronaError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(DelayCoronaError, ValueError):
    pass


class InvalidLag(InvalidInput):
    pass


class DecompositionError(DelayCoronaError):
    """A lag is not representable in the delay lattice at hand."""


class MeshMismatch(DelayCoronaError):
    pass


class UnsupportedMesh(DelayCoronaError):
    """Delays are not integer multiples of the simulation mesh."""


class UnsupportedCase(DelayCoronaError):
    pass


class BudgetExceeded(DelayCoronaError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NotACommonZero(DelayCoronaError):
    pass


class NotCoprime(DelayCoronaError):
    def __init__(self, message, gcd):
        super().__init__(message)
        self.gcd = gcd


class CoronaViolated(DelayCoronaError):
    def __init__(self, message, gcd=None):
        super().__init__(message)
        self.gcd = gcd


class Unreachable(DelayCoronaError):
    """Raised by steering when the target is outside the reachable set."""

    def __init__(self, message, certificate):
        super().__init__(message)
        self.certificate = certificate


class ConfigError(DelayCoronaError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
