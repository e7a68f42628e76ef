"""Exception hierarchy shared by all qubokit modules."""

from __future__ import annotations


class QubokitError(Exception):
    """Base class for all qubokit errors."""


class DimensionError(QubokitError, ValueError):
    """A sample, index, or matrix does not match the model dimensions."""


class CapacityError(QubokitError, ValueError):
    """A problem exceeds a hard size cap (e.g. the exact-solver limit)."""


class ConfigurationError(QubokitError, ValueError):
    """A solver configuration is inconsistent or unusable."""


class InstanceError(QubokitError, ValueError):
    """A problem instance violates its invariants or is degenerate."""


class PortfolioError(QubokitError, RuntimeError):
    """Every branch of a parallel workflow failed in the same iteration."""


class TransportError(QubokitError, RuntimeError):
    """A remote sampler could not be reached; safe to retry."""

    retryable = True


class ProtocolError(QubokitError, RuntimeError):
    """A remote sampler replied with a malformed or invalid payload."""

    retryable = False
