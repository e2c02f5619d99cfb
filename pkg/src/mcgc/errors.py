"""Exception types raised by the pipeline."""


class MCGCError(Exception):
    """Base class for all package errors."""


class DataError(MCGCError):
    """Malformed or inconsistent input data."""


class ParseError(DataError):
    def __init__(self, path, line, reason):
        self.path = str(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path}:{line}: {reason}")


class ShapeError(DataError):
    pass


class ManifestError(DataError):
    pass


class ConfigError(MCGCError, ValueError):
    pass


class LengthMismatch(MCGCError, ValueError):
    pass


class NumericalError(MCGCError):
    pass


class IsolatedNodeError(NumericalError):
    pass


class DivergenceError(NumericalError):
    pass


class EigenError(NumericalError):
    pass
