"""Exception types raised across the package."""


class PacsError(Exception):
    """Base class for all errors raised by :mod:`pacs`."""


class TruncationTooSmall(PacsError, ValueError):
    """The Fock cutoff leaves more probability mass outside than tolerated."""


class UndefinedGain(PacsError, ValueError):
    pass


class UndefinedFano(PacsError, ValueError):
    pass


class IndexOutOfRange(PacsError, IndexError):
    pass


class UnsupportedConfiguration(PacsError, ValueError):
    pass


class BadBinning(PacsError, ValueError):
    pass


class PhaseNotOnGrid(PacsError, ValueError):
    pass


class DimMismatch(PacsError, ValueError):
    pass


class CubicRootStructureViolation(PacsError, ArithmeticError):
    pass


class UnsupportedRank(PacsError, ValueError):
    pass


class OutOfGrid(PacsError, ValueError):
    pass


class DegenerateLeadingValue(PacsError, ArithmeticError):
    pass


class ConfigError(PacsError, ValueError):
    pass
