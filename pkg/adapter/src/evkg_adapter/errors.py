"""Error types shared across the adapter, mapped to exit codes."""

from __future__ import annotations


class AdapterError(Exception):
    """Base class; exit_code drives the command-line status."""

    exit_code = 1


class FormatError(AdapterError):
    """Malformed input data."""

    exit_code = 2


class ConfigError(AdapterError):
    """Unusable options or file arguments."""

    exit_code = 3
