"""Exception types shared across the engine."""


class TierkiteError(Exception):
    """Base class for all engine errors."""


class InvalidConfig(TierkiteError):
    pass


class EmptyDocument(TierkiteError):
    """Document is empty after parsing and whitespace normalization."""


class EmptyCorpus(TierkiteError):
    """Corpus directory contains no parseable files."""


class CorruptShard(TierkiteError):
    def __init__(self, shard_id: int, message: str = ""):
        self.shard_id = shard_id
        super().__init__(message or f"shard {shard_id} failed digest verification")


class TrainError(TierkiteError):
    """Quantizer training received an insufficient or degenerate sample."""


class ShapeError(TierkiteError):
    """Vector dimension does not match the index."""


class FormatError(TierkiteError):
    """On-disk index file is truncated, has a bad magic, or wrong version."""


class DuplicateId(TierkiteError):
    pass


class MigrationError(TierkiteError):
    """A requested id is missing from the hot tier; nothing was removed."""


class CalibrationError(TierkiteError):
    pass


class WouldBlock(TierkiteError):
    """A second writer attempted to acquire the global write lock."""


class BudgetExceeded(TierkiteError):
    """Mandatory components cannot fit under the memory ceiling."""

    def __init__(self, items, ceiling: int):
        self.items = dict(items)
        self.ceiling = ceiling
        listing = ", ".join(f"{k}={v}" for k, v in self.items.items())
        super().__init__(f"memory ceiling {ceiling} exceeded by mandatory set: {listing}")


class BenchError(TierkiteError):
    pass


class NotReady(TierkiteError):
    """Engine queried before its indexes were loaded."""
