"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid argument: wrong dimension, out-of-domain point, bad range."""


class UnsupportedParameterError(InputError):
    pass


class NumericalError(ArithmeticError):
    """A factorization or likelihood evaluation failed beyond recovery."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ExhaustedDomainError(RuntimeError):
    """No admissible point is left to query."""


class DataFormatError(ValueError):
    """A data file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        if line is not None:
            message = f"{path}:{line}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


class ConfigError(ValueError):
    pass


class InvariantViolation(AssertionError):
    """A runtime check on the balancing algorithm failed.

    ``diagnostics`` holds the quantities that were compared.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class FileError(OSError):
    """Writing an output file failed; ``path`` names the file."""

    def __init__(self, message, path=None):
        super().__init__(f"{path}: {message}" if path is not None else message)
        self.path = path


class RunFailure(RuntimeError):
    """Every seed of an experiment failed."""

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)
