"""Exception hierarchy shared by every module."""


class GMethodError(Exception):
    """Base class for all errors raised by :mod:`gmethod`."""


class InvalidInputError(GMethodError, ValueError):
    """Malformed or inconsistent input (shapes, index sets, partitions)."""


class NotBlockStableError(GMethodError):
    """A matrix is not block stable for the requested row/column partitions.

    ``report`` carries the :class:`~gmethod.stable.StabilityReport` witness;
    ``position`` is the 1-based factor index when raised from a chain check.
    """

    def __init__(self, report, position=None):
        self.report = report
        self.position = position
        where = f"factor {position}: " if position is not None else ""
        super().__init__(f"{where}{report.describe()}")


class SimilarityError(GMethodError):
    """A replacement factor does not have the same grouped matrix."""


class NotCertifiedError(GMethodError):
    """No finite-time consensus certificate exists within the given horizon."""


class ConsistencyError(GMethodError, AssertionError):
    """Two independent computations that must agree did not (a bug)."""


class ParseError(InvalidInputError):
    """Malformed input file; ``where`` locates the problem (``file:line:col`` or a JSON path)."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")
