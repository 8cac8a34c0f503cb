"""Exceptions raised by net construction and verification"""


class EpsNetError(Exception):
    """Base class for every error raised by epsnet."""


class InvalidParameter(EpsNetError, ValueError):
    """A numeric parameter is outside its admissible range."""


class PerturbationFailed(EpsNetError):
    """General position could not be reached (duplicate input points)."""


class LineThroughPoint(EpsNetError):
    """A decomposition line passes through a point it must avoid."""


class TooFewPoints(EpsNetError):
    """An operation received an empty point set."""


class TooLarge(EpsNetError):
    """An exhaustive check was asked for an instance beyond its size ceiling."""


class AttemptsExhausted(EpsNetError, TimeoutError):
    """A sample-and-verify loop ran out of attempts."""


class CuttingNotFound(AttemptsExhausted):
    """No sampled cutting met the crossing bound."""


class NetNotFound(AttemptsExhausted):
    """No sampled strong net passed verification."""
