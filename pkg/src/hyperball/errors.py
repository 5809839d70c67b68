"""Shared exception types."""


class HyperballError(Exception):
    """Base class for all library errors."""


class DimMismatch(HyperballError):
    """Operands live in spaces of different dimensions."""


class SizeCapExceeded(HyperballError):
    """An exhaustive enumeration would exceed the configured size cap."""
