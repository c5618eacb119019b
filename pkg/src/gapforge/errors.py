"""Exception types shared across the toolkit."""


class GapforgeError(Exception):
    """Base class for all gapforge errors."""


class InvalidRange(GapforgeError):
    """A range query with lo >= hi or otherwise malformed endpoints."""


class CeilingExceeded(GapforgeError):
    """A query reached past the configured sieve ceiling.

    `frontier` carries the largest value that was actually covered before
    the ceiling stopped the computation (useful for scan-to-frontier
    reporting).
    """

    def __init__(self, message, frontier=None):
        super().__init__(message)
        self.frontier = frontier


class PrecisionExhausted(GapforgeError):
    """An enclosure could not be narrowed enough at the precision cap.

    Raised instead of guessing: a comparison or floor that is still
    ambiguous at max precision must surface as Uncertain, never as a
    silently-picked side.
    """


class MalformedSequence(GapforgeError):
    """A synthetic sequence is not strictly increasing or too short."""


class UsageError(GapforgeError):
    """Bad CLI arguments or parameter domain violations (exit code 2)."""
