"""Exception hierarchy shared by all modules."""


class AbcSimError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(AbcSimError, ValueError):
    """Operands have incompatible sizes."""


class ValidationError(AbcSimError, ValueError):
    """An object violates a structural invariant."""

    def __init__(self, message, issues=()):
        super().__init__(message)
        self.issues = list(issues)


class CircuitParseError(AbcSimError, ValueError):
    """Malformed input file; carries the 1-based line number when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class StaleArtifactError(AbcSimError):
    """A precompute artifact does not match the circuit/checks it is used with."""


class ResourceLimitError(AbcSimError):
    """A requested enumeration exceeds the configured cap."""
