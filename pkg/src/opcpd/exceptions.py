"""Exception types and warnings shared across the package."""


class InsufficientDataError(ValueError):
    """The input is too short for the requested configuration.

    ``min_length`` carries the smallest input size that would succeed,
    in the units of the failing stage (raw samples or pattern positions).
    """

    def __init__(self, message: str, min_length: int | None = None):
        super().__init__(message)
        self.min_length = min_length


class InvalidSampleError(ValueError):
    """A sample is NaN or infinite. ``index`` points at the offender."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class SeriesFormatError(ValueError):
    """A CSV cell could not be parsed as a finite real. ``row`` is the
    1-based file row of the offending record."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class ReplicationError(RuntimeError):
    """A Monte Carlo replication failed. ``replication`` is its index."""

    def __init__(self, message: str, replication: int):
        super().__init__(message)
        self.replication = replication


class WindowSizeWarning(UserWarning):
    """The window holds too few patterns relative to the alphabet size for
    the relative frequencies to be stable."""
