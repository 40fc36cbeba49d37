"""Define Python user-defined exceptions"""

from __future__ import annotations


class FejerLimitError(Exception):
    """
    Base class for every error raised on purpose by the fejerlimit package.
    """


class IndexRangeError(FejerLimitError, IndexError):
    """
    Thrown if a harmonic index or quantum number falls outside the range a table or coefficient array covers.
    """


class UndersampledError(FejerLimitError, ValueError):
    """
    Thrown if a quadrature request has fewer samples per period than the aliasing floor allows.
    """


class InvalidPacketError(FejerLimitError, ValueError):
    """
    Thrown if a wave packet violates n - N > 0, has the wrong coefficient count, or has zero norm.
    """


class ScheduleError(FejerLimitError, ValueError):
    """
    Thrown if a classical-limit schedule is not increasing or leaves the packet band invalid.
    """


class UnsupportedObservableError(FejerLimitError, ValueError):
    """
    Thrown if an observable is not known to the requested quantum system.
    """


class ResidueError(FejerLimitError, ArithmeticError):
    """
    Thrown if the expectation of a Hermitian observable keeps an imaginary part above tolerance.
    """


class ConfigError(FejerLimitError, ValueError):
    """
    Thrown if a command line or config file value cannot be turned into a valid run configuration.
    """
