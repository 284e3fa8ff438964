"""Exception hierarchy.

Everything derives from :class:`WideGapsError`, which is a ``ValueError`` so
callers that only care about bad input can catch the builtin.
"""


class WideGapsError(ValueError):
    """Base class for all validation and configuration errors."""


class DuplicatePoint(WideGapsError):
    pass


class AsymmetricInput(WideGapsError):
    pass


class NegativeDistance(WideGapsError):
    pass


class TooSmall(WideGapsError):
    pass


class InvalidClustering(WideGapsError):
    pass


class KTooSmall(WideGapsError):
    pass


class KOutOfRange(WideGapsError):
    pass


class NegativeBeta(WideGapsError):
    """The residual threshold sqrt(beta) is undefined because beta < 0."""


class InvalidSpec(WideGapsError):
    pass


class SizeMismatch(WideGapsError):
    pass


class ConfigInvalid(WideGapsError):
    pass


class ResidualUndefined(WideGapsError):
    pass


class RangePlantFailed(WideGapsError):
    pass


class TooLarge(WideGapsError):
    pass


class InvalidArgs(WideGapsError):
    pass


class InvariantBreach(AssertionError):
    """An internal guarantee did not hold; signals a bug, not bad input."""
