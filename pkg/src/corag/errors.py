"""Exception types shared across the package.

Everything user-facing derives from :class:`CoragError`; the CLI maps these
to exit code 2 and any other exception to exit code 1.
"""


class CoragError(Exception):
    """Base class for validation and input errors."""


class IngestError(CoragError):
    """Corpus or query ingestion rejected (duplicate ids, malformed lines)."""


class StoreError(CoragError):
    """Vector-store constraint violated (dimension mismatch, id conflict)."""


class StoreFormatError(CoragError):
    """Persisted store file is corrupt or has an unsupported version."""


class ScoringError(CoragError):
    """A combination referenced a chunk id the scorer cannot resolve."""


class OracleSizeError(CoragError):
    """Exhaustive enumeration refused: candidate count above the guard."""


class WeightsError(CoragError):
    """Agent weight file missing, malformed, or shape-inconsistent."""
