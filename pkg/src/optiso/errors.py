"""Exception hierarchy shared by every layer of optiso."""


class OptisoError(Exception):
    """Base class for all errors raised by this package."""


class DriverError(OptisoError):
    """A compiler driver could not do what was asked."""


class DriverUnavailable(DriverError):
    pass


class LevelUnknown(DriverError):
    pass


class Timeout(DriverError):
    pass


class CoverageUnavailable(DriverError):
    pass


class InvalidConfiguration(OptisoError, ValueError):
    pass


class ParseError(OptisoError, ValueError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
        self.line = line
        self.field = field


class ValidationError(OptisoError, ValueError):
    pass


class NonReproducing(OptisoError):
    """The failing configuration does not actually fail."""


class FailConfNotFailing(OptisoError):
    pass


class AllPassConfsInvalid(OptisoError):
    pass


class NoPassingLevel(OptisoError):
    pass


class EmptySpectrum(OptisoError):
    pass


class MissingSpectrum(OptisoError, KeyError):
    pass


class InvalidCounts(OptisoError, ValueError):
    pass


class EmptyFile(OptisoError, ValueError):
    pass


class InvalidRank(OptisoError, ValueError):
    pass


class EmptyInput(OptisoError, ValueError):
    pass


class EmptySample(OptisoError, ValueError):
    pass


class EmptyCorpus(OptisoError, ValueError):
    pass
