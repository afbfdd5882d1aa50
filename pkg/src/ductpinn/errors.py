"""Exception hierarchy shared across the package."""


class DuctPinnError(Exception):
    """Base class for every error raised by ductpinn."""


class StructuralError(DuctPinnError, ValueError):
    """Shapes or lengths that do not fit the declared architecture."""


class InputError(DuctPinnError, ValueError):
    """Invalid argument values (non-finite numbers, empty arrays, ...)."""


class DomainError(DuctPinnError, ValueError):
    """Position outside the duct ``[0, L]``."""


class NumericError(DuctPinnError, ArithmeticError):
    """Non-finite value produced during a computation.

    ``index`` holds the offending collocation point and ``iteration`` the
    optimizer iteration, when known.
    """

    def __init__(self, message, index=None, iteration=None):
        super().__init__(message)
        self.index = index
        self.iteration = iteration


class SingularConfigurationError(DuctPinnError, ArithmeticError):
    """Resonant or otherwise degenerate configuration of the closed forms."""


class UnsupportedAnalysisError(DuctPinnError, ValueError):
    """Analysis requested outside its assumptions (e.g. complex boundary data)."""
