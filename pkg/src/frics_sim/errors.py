"""Exception types shared across the package."""


class FricsError(Exception):
    """Base class for all errors raised by frics_sim."""


class DomainError(FricsError, ValueError):
    """A physical quantity lies outside the range a model accepts."""


class UnreachableCapacitanceError(DomainError):
    pass


class OutOfBandError(DomainError):
    """Requested resonance lies outside what the varactor can tune to."""

    def __init__(self, target, f_low, f_high):
        self.target = target
        self.f_low = f_low
        self.f_high = f_high
        super().__init__(
            f"target {target:.6g} Hz outside achievable band "
            f"[{f_low:.6g}, {f_high:.6g}] Hz"
        )


class SingularNetworkError(FricsError, ArithmeticError):
    pass


class ConfigError(FricsError):
    pass


class InBandInterfererWarning(UserWarning):
    """The interferer sits inside the bandstop filter's stopband."""
