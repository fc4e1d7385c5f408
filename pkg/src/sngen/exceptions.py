"""Exception types shared across the package."""


class ArityError(ValueError):
    """Two interval-vectors (or a vector and a specification) disagree on dimension."""


class ContainmentError(ValueError):
    """An experiment is not contained by the bounds of its factor specification."""


class UnknownFactorError(KeyError):
    """A hypothesis names a factor the background has no function for."""


class FactorUndefined(Exception):
    """A factor function could not produce a value for an instance."""


class NegativelyInfiniteScore(ArithmeticError):
    """The Q-score is -inf (log of zero).  Rankers treat it as the worst score."""


class Exhausted(RuntimeError):
    """No properly contained sub-experiment exists (every interval is a point)."""


class BackendError(RuntimeError):
    """A generator backend failed to produce a draw (after any retries)."""


class CredentialsError(BackendError):
    """The API key environment variable named in the configuration is unset."""


class ReplayMismatch(BackendError):
    """A replayed request does not match the recorded digest at that position."""


class ParseFailure(ValueError):
    """Generator output did not contain a bracketed candidate list."""


class AdapterError(RuntimeError):
    """An external factor subprocess exited with a nonzero status."""


class GenAborted(RuntimeError):
    """A generation run stopped early; ``partial`` holds the iterations completed."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
