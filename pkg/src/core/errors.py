"""
Error Types Module

This module defines the exception hierarchy shared by the library and the CLI.
The CLI maps InputError to exit status 2 and InvariantViolation to exit status 1.
"""

from typing import Any, Optional


class KStarError(Exception):
    """Base class for all errors raised by this package."""


class InputError(KStarError):
    """Malformed input data, schema violations or invalid command-line values."""

    def __init__(self, message: str, source: Optional[str] = None):
        self.source = source
        if source:
            message = f"{source}: {message}"
        super().__init__(message)


class ConfigError(InputError):
    """Invalid environment configuration."""


class DegenerateFanError(InputError):
    """Fan rays are not primitive, not covered, or do not span the lattice as a cone."""


class UnsupportedFanError(KStarError):
    """The fan has a non-simplicial maximal cone where finite local groups are needed."""


class InvariantViolation(KStarError):
    """
    An internal identity failed.

    The offending instance is kept in ``instance`` so the caller can
    serialize it for replay.
    """

    def __init__(self, message: str, instance: Any = None):
        self.instance = instance
        super().__init__(message)


__all__ = [
    'KStarError',
    'InputError',
    'ConfigError',
    'DegenerateFanError',
    'UnsupportedFanError',
    'InvariantViolation',
]
