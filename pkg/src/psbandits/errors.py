"""Exception types shared across the package.

Everything derives from ValueError so that callers who just want "bad
input" semantics can catch one type, while tests and the CLI can
distinguish the specific failure.
"""


class InvalidConfigurationError(ValueError):
    """A constructor or builder was given parameters outside its domain."""


class SegmentTableParseError(ValueError):
    """A segment-table document is malformed.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InsufficientDataError(ValueError):
    """A statistic was requested from fewer observations than it needs."""


class CapacityError(ValueError):
    """An enumeration would exceed the configured size cap."""


class DegenerateGapsError(ValueError):
    """Every super arm meets the approximation target, so no
    suboptimality gap is defined."""
