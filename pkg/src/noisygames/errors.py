"""Exception types shared across the package."""


class NoisyGamesError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDimensionError(NoisyGamesError, ValueError):
    """A dimension argument is out of range or inconsistent with the data."""


class BasisMismatchError(NoisyGamesError, ValueError):
    """Operators expressed in different bases were combined."""


class InvalidParameterError(NoisyGamesError, ValueError):
    """A numeric parameter is outside its admissible domain."""


class InvalidInputError(NoisyGamesError, ValueError):
    """Malformed input data (shape, range, or consistency violation)."""


class InvalidIndexError(NoisyGamesError, IndexError):
    """A register or coordinate index is out of range."""


class NormalizationError(NoisyGamesError, ValueError):
    """An operator violates a required norm bound."""


class SizeLimitError(NoisyGamesError, RuntimeError):
    """A dense synthesis or enumeration exceeds the configured budget."""


class EnumerationLimitError(SizeLimitError):
    """An exhaustive enumeration would be too large."""


class UnsupportedDegreeError(InvalidParameterError):
    """No tabulated irreducible polynomial for the requested field degree."""


class FieldSizeError(InvalidParameterError):
    """The finite field is too small for the requested hash family."""


class NotNoisyError(NoisyGamesError, ValueError):
    """The state has maximal correlation 1 and is not a noisy MES."""


class InvalidStateError(NoisyGamesError, ValueError):
    """A density matrix fails the required marginal or positivity conditions."""
