"""Exception hierarchy shared by the library and the CLI."""


class SecComputeError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(SecComputeError, ValueError):
    """Bad input: malformed distribution, overlapping subsets, wrong shapes."""


class ResourceLimitError(SecComputeError):
    """An instance exceeds one of the desk-scale caps."""


class CapacityTooLargeError(ResourceLimitError):
    """Too many terminals for subset enumeration."""


class DecoderSpaceTooLargeError(ResourceLimitError):
    """Sequence or bin space too large for exhaustive decoding."""
