"""Exception hierarchy shared across the package."""


class FirstQuantError(Exception):
    """Base class for all package errors."""


class ZeroNormError(FirstQuantError, ValueError):
    pass


class BadLengthError(FirstQuantError, ValueError):
    pass


class IndexOutOfRangeError(FirstQuantError, IndexError):
    pass


class UnsupportedOrderError(FirstQuantError, ValueError):
    pass


class ComplexAmplitudesRejected(FirstQuantError, ValueError):
    """Raised when a boundary-term circuit path is asked to handle complex amplitudes."""


class LengthMismatchError(FirstQuantError, ValueError):
    pass


class TooLargeError(FirstQuantError, ValueError):
    pass


class ParamLengthMismatch(FirstQuantError, ValueError):
    pass


class NonpositiveWidthError(FirstQuantError, ValueError):
    pass


class ConfigInvalid(FirstQuantError, ValueError):
    pass
