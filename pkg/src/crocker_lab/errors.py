"""Exception types raised across the package."""


class CrockerError(Exception):
    pass


class NonFinite(CrockerError, ArithmeticError):
    """A simulated state overflowed or became NaN."""


class InsufficientData(CrockerError, ValueError):
    pass


class Degenerate(CrockerError, ValueError):
    pass


class EmptyCloud(CrockerError, ValueError):
    pass


class SizeLimit(CrockerError, ValueError):
    pass


class InvalidOverlap(CrockerError, ValueError):
    pass


class NoFiniteBars(CrockerError, ValueError):
    pass


class ZeroVariance(CrockerError, ValueError):
    pass


class GridMismatch(CrockerError, ValueError):
    pass


class MissingArtifacts(CrockerError, FileNotFoundError):
    pass


class ParseError(CrockerError, ValueError):
    pass
