"""Exception types raised across the package."""


class NyqmonError(Exception):
    """Base class for all errors raised by nyqmon."""


# series model
class EmptyTrace(NyqmonError, ValueError):
    pass


class GapTooLarge(NyqmonError, ValueError):
    pass


class InvalidRate(NyqmonError, ValueError):
    pass


class ShapeMismatch(NyqmonError, ValueError):
    pass


# spectral core
class EmptySeries(NyqmonError, ValueError):
    pass


class MissingCoefficients(NyqmonError, ValueError):
    pass


class TooShort(NyqmonError, ValueError):
    pass


class DegenerateSignal(NyqmonError, ValueError):
    """The series carries no energy once its mean is removed."""


class InvalidCutoff(NyqmonError, ValueError):
    pass


class InvalidTargetRate(NyqmonError, ValueError):
    pass


# alias detection
class IntegerRatio(NyqmonError, ValueError):
    pass


class WindowMismatch(NyqmonError, ValueError):
    pass


class RateMismatch(NyqmonError, ValueError):
    pass


# adaptive sampler
class ConfigViolation(NyqmonError, ValueError):
    pass


class HorizonTooShort(NyqmonError, ValueError):
    pass


# trace files and specs
class ParseError(NyqmonError, ValueError):
    def __init__(self, message, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.path = path


class NonMonotoneTimestamps(ParseError):
    pass


class EmptyFile(ParseError):
    pass


class AllTracesFailed(NyqmonError, RuntimeError):
    pass
