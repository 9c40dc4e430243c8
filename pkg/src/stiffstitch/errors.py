"""Exception and warning types shared across the toolchain."""

from __future__ import annotations


class StiffstitchError(Exception):
    """Base class for every domain error raised by this package."""


class InvariantViolation(StiffstitchError):
    """A domain object was constructed or mutated into an invalid state."""


# --- geometry ---------------------------------------------------------------

class RegionDegenerate(StiffstitchError):
    """The region is too small to carry the requested fill."""


class ConfigMismatch(StiffstitchError):
    """A fill routine was called with the wrong primitive or region kind."""


# --- parsing and tables -----------------------------------------------------

class ParseError(StiffstitchError):
    """Malformed text input. Carries a 1-based line (or row) number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownKey(ParseError):
    """A spec file used a key that is not part of its section's schema."""


class UnknownFabric(StiffstitchError):
    """Fabric name is not present in the registry."""


# --- calibration ------------------------------------------------------------

class InsufficientCalibration(StiffstitchError):
    """The query falls outside the measured range of the matching series."""


class UnknownConfig(StiffstitchError):
    """No calibration series exists for the requested configuration."""


class NonStretchFabric(StiffstitchError):
    """Tensile prediction was requested for a fabric that cannot stretch."""


class UnsupportedMold(StiffstitchError):
    """Formability is only characterized for the bench mold diameters."""


class UnknownAffordance(StiffstitchError):
    """Affordance name is not one of the supported design properties."""


# --- machine file codec -----------------------------------------------------

class NameTooLong(StiffstitchError):
    """Design names are limited to 16 characters in the file header."""


class CoordinateOverflow(StiffstitchError):
    """A quantized coordinate exceeds the representable machine range."""


class BadHeader(StiffstitchError):
    """The 512-byte header is missing or malformed."""


class BadRecord(StiffstitchError):
    """A movement record is malformed. Carries the byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"offset {offset}: {message}"
        super().__init__(message)


class ExtentMismatch(UserWarning):
    """Header fields disagree with the decoded record stream."""
