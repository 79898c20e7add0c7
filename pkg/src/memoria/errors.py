"""Exception hierarchy for the memoria engine."""


class MemoriaError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(MemoriaError, ValueError):
    """Invalid engine configuration."""


class SequencingError(MemoriaError, RuntimeError):
    """An operation was called out of phase (e.g. retrieval with an empty
    working memory, or adding vectors while the previous batch is still
    in working memory)."""


class ShapeError(MemoriaError, ValueError):
    """Input vectors do not match the configured dimensionality or batch
    size limits."""


class UnknownEngramError(MemoriaError, KeyError):
    """An engram id that does not exist (never created, or already deleted)."""


class ContractError(MemoriaError, ValueError):
    """Contribution weights do not match the retrieved set they apply to."""


class TraceError(MemoriaError, ValueError):
    """Malformed trace file. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SnapshotError(MemoriaError, ValueError):
    """Malformed or unsupported snapshot file."""


class PhaseError(MemoriaError, RuntimeError):
    """Two-phase binding protocol violated (feedback without a pending
    retrieval, or a second retrieval before feedback)."""
