"""Exception types shared across the package."""

__all__ = [
    "MargraphError",
    "GraphError",
    "DataError",
    "ModelFormatError",
    "CapabilityError",
]


class MargraphError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(MargraphError):
    """Invalid graph structure: bad clique members, order, or dimensions."""


class DataError(MargraphError):
    """Invalid data: malformed file, wrong shape, or out-of-range values."""


class ModelFormatError(MargraphError):
    """Model file cannot be parsed or has an unsupported version."""


class CapabilityError(MargraphError):
    """Requested an exact computation beyond the supported problem size."""
