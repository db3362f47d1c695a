"""Exception hierarchy shared by all modules."""


class GramLawError(Exception):
    """Base class for every error raised by the package."""


class DomainError(GramLawError, ValueError):
    """An argument lies outside the admissible domain of an operation."""


class ConvergenceError(GramLawError, ArithmeticError):
    """An iterative solver did not reach its tolerance."""


class UnresolvedBlockError(GramLawError):
    """A Gram block still misses sign changes after maximal subdivision."""

    def __init__(self, message, blocks=()):
        super().__init__(message)
        self.blocks = list(blocks)


class CertificationError(GramLawError):
    """A zero count disagrees with the Riemann-von Mangoldt estimate."""


class CoverageError(GramLawError, LookupError):
    """A requested index or height is not covered by the available data."""


class TableFormatError(GramLawError, ValueError):
    """A zero table file is malformed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ChecksumError(TableFormatError):
    """Stored checksum does not match the file body."""


class VersionError(TableFormatError):
    """Cache file written by an unsupported format version."""
