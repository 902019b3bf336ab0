"""Exception and warning types shared across the package."""


class ConvergenceError(RuntimeError):
    """An iterative numerical procedure failed to reach its tolerance."""


class AmbiguousWindowError(RuntimeError):
    """A detection window holds competing peaks of nearly equal height."""


class HorizonTooShortError(RuntimeError):
    """A scan ended before the sought feature could be confirmed."""


class CutoffTooSmallError(ValueError):
    """A basis truncation leaves too much weight outside the kept modes."""


class CompletenessWarning(UserWarning):
    """The projected state is not fully captured by the bound-state basis."""
