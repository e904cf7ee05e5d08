"""Exception types raised by the degradation engine."""


class AquasynthError(Exception):
    """Base class for all package errors."""


class SpectralRangeError(AquasynthError, ValueError):
    """Requested wavelengths fall outside a curve's sampled support."""


class DegenerateResponseError(AquasynthError, ValueError):
    """A channel's response-weighted normalization integral is not positive."""


class DimensionError(AquasynthError, ValueError):
    """Array shapes do not match the operation's contract."""


class DomainError(AquasynthError, ValueError):
    """A scalar argument is outside its physical domain."""


class ParametrizationError(AquasynthError, ValueError):
    """Coefficients violate a model constraint (e.g. forward attenuation above beta)."""


class DegenerateDepthError(AquasynthError, ValueError):
    """A relative depth map cannot be min-max normalized (constant input)."""


class DecodeError(AquasynthError, ValueError):
    """A file could not be decoded as the expected image/depth format."""


class CsvFormatError(AquasynthError, ValueError):
    """A spectral CSV file has unknown headers or malformed rows."""


class NumericalFaultError(AquasynthError, ArithmeticError):
    """A non-finite value appeared in an intermediate term; never clamped silently."""


class ConfigError(AquasynthError, ValueError):
    """A configuration value is missing, mistyped, or out of range.

    The message carries the dotted key path of the offending entry.
    """
