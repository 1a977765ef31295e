"""Exception hierarchy shared across the engine.

Each class carries the process exit code the CLI maps it to, so library
code can raise precisely and the CLI stays a thin translation layer.
"""

from __future__ import annotations


class EvkgError(Exception):
    """Base class for all engine errors."""

    exit_code = 4


class FormatError(EvkgError):
    """Malformed or inconsistent input data (files, records, vectors)."""

    exit_code = 2


class ConfigError(EvkgError):
    """Invalid configuration or flag combination."""

    exit_code = 3


class InvariantError(EvkgError):
    """An internal invariant was violated; indicates a bug, not bad input."""

    exit_code = 4


class UnknownNodeError(FormatError):
    """A node id does not exist in the knowledge graph."""


class UnknownRelationError(FormatError):
    """A relation name or id is not present in the relation table."""


class DimensionMismatchError(FormatError):
    """Vector or matrix dimensions do not agree."""
