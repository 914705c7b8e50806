"""Exception types shared across the package."""


class FxRegimeError(Exception):
    """Base class for all package-specific errors."""


class InvalidModelError(FxRegimeError, ValueError):
    """A model object violates its structural invariants."""


class DivergenceError(FxRegimeError, ValueError):
    """An integral or moment generating function does not converge."""


class NoSolutionError(FxRegimeError, RuntimeError):
    """A root-finding problem has no solution on the admissible interval."""


class InconsistencyError(FxRegimeError, RuntimeError):
    """A quantity violates an identity it is required to satisfy."""


class DegenerateDataError(FxRegimeError, ValueError):
    """Input data cannot support the requested estimate."""


class InputError(FxRegimeError, ValueError):
    """Malformed user-supplied input (files, config values)."""
