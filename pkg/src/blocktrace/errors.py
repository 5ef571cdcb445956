"""Exception hierarchy. The CLI maps every subclass to exit code 2."""


class BlockTraceError(ValueError):
    """Base class for input, usage and hypothesis errors."""


class UsageError(BlockTraceError):
    """Invalid argument: unknown id, axis, order, angle out of range."""


class SizeError(BlockTraceError):
    """Dimension mismatch or a size cap exceeded."""


class DomainError(BlockTraceError):
    """Input violates a mathematical precondition (Hermitian, PSD, sector)."""
