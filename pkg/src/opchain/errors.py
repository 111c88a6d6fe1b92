"""Exception types shared across the toolkit.

Every error raised by the library derives from OpChainError so the CLI can
map domain failures to exit code 1 and genuine usage mistakes to exit code 2.
"""


class OpChainError(Exception):
    """Base class for all toolkit errors."""


class DecodeError(OpChainError):
    """Malformed or unsupported image stream.

    Carries the byte offset at which decoding failed (best effort).
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class DimensionError(OpChainError):
    """Shape or channel-count mismatch."""


class ParameterError(OpChainError):
    """Argument outside its permitted range."""


class UndefinedCorrelationError(OpChainError):
    """Pearson correlation requested on a zero-variance input."""


class ChainEncodingError(OpChainError):
    """Chain not representable in the given label universe."""


class CheckpointError(OpChainError):
    """Unreadable or incompatible checkpoint container."""


class DataLoadError(OpChainError):
    """Dataset record could not be materialized."""


class TrainingDivergedError(OpChainError):
    """Loss became non-finite during optimization."""


class UsageError(OpChainError):
    """Bad CLI invocation: unknown keys, conflicting flags, bad subcommand."""
