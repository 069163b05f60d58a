"""Exception hierarchy.

Every precondition failure carries a message naming the violated
inequality, so callers (and the CLI) can report exactly which hypothesis
broke.  Exit-code mapping lives in the CLI: precondition/region/config
errors exit 2, anything else exits 1.
"""


class DoubleZetaError(Exception):
    """Base class for all package errors."""


class DomainError(DoubleZetaError):
    """A scalar argument is outside the operation's domain (e.g. n <= 0)."""


class RegionError(DoubleZetaError):
    """Parameters violate a convergence-region inequality."""


class SingularHyperplaneError(DoubleZetaError):
    """Evaluation requested too close to a singular hyperplane."""


class PathError(DoubleZetaError):
    """A mean-square integration path hits an inadmissible point.

    Carries ``t3`` of the first failing point.
    """

    def __init__(self, message: str, t3: float):
        super().__init__(message)
        self.t3 = t3


class InsufficientDataError(DoubleZetaError):
    """Not enough samples for a statistical operation."""


class NumericalError(DoubleZetaError):
    """A non-finite intermediate value was produced; aborted rather than
    propagated."""


class ConfigError(DoubleZetaError):
    """Malformed or inconsistent run configuration."""
