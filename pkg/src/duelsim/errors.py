"""Exception types shared across the package.

Everything derives from ``DuelSimError`` so callers can catch the whole
family, while the mixin bases (``ValueError`` / ``RuntimeError``) keep the
exceptions well-behaved for generic handlers.
"""


class DuelSimError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(DuelSimError, ValueError):
    """An array argument has the wrong shape (non-square, wrong size, ...)."""


class RangeError(DuelSimError, ValueError):
    """A numeric entry lies outside its permitted interval."""


class ComplementViolation(DuelSimError, ValueError):
    """A pair of win probabilities does not sum to one within tolerance."""


class AttemptsExhausted(DuelSimError, RuntimeError):
    """Rejection sampling gave up after the configured number of attempts."""


class InvalidWinner(DuelSimError, ValueError):
    """A reported duel winner is not one of the two arms that dueled."""


class DomainError(DuelSimError, ValueError):
    """A scalar argument lies outside the mathematical domain of a function."""


class EmptyInput(DuelSimError, ValueError):
    """An aggregation was asked to summarize zero replications."""


class ConfigMismatch(DuelSimError, ValueError):
    """Two configuration pieces disagree (e.g. matrix size vs. arm count)."""


class ParseError(DuelSimError, ValueError):
    """A ranker matrix file could not be parsed as a numeric grid."""


class SizeMismatch(DuelSimError, ValueError):
    """A loaded matrix does not have the declared number of rankers."""


class ModeMismatch(DuelSimError, ValueError):
    """Explicitly chosen indices contradict the requested sampling mode."""
