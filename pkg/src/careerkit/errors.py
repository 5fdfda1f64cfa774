"""Domain exceptions shared across the engine."""


class CareerKitError(Exception):
    """Base class for all domain errors."""


class EmptyText(CareerKitError):
    """Input text is empty or whitespace-only."""


class DimensionMismatch(CareerKitError):
    """Vector dimension does not match the expected dimension."""


class DuplicateId(CareerKitError):
    """Entry id already present in the index."""


class CorruptIndex(CareerKitError):
    """Index file failed magic/checksum validation."""


class EmptyDocument(CareerKitError):
    """Document has no text to chunk."""


class StorageError(CareerKitError):
    """Record store could not be read or written."""


class OutOfRetention(CareerKitError):
    """Requested revert point is older than the retention window."""


class UnknownRecord(CareerKitError):
    """No record (or no version at the requested time) for this key."""


class FetchError(CareerKitError):
    """A single source item could not be fetched or decoded."""


class TranslatorUnavailable(CareerKitError):
    """Translation plugin failed or violated its contract."""


class IndexUnavailable(CareerKitError):
    """No vector index is attached or it cannot serve queries."""


class InvalidCoordinate(CareerKitError):
    """Latitude/longitude outside valid ranges."""


class FuturePostDate(CareerKitError):
    """Job posting date lies in the future."""


class LexiconMissing(CareerKitError):
    """Skill lexicon not loaded."""


class NoQuestionsFound(CareerKitError):
    """Question bank text contained no recognizable questions."""


class InsufficientQuestions(CareerKitError):
    """Not enough distinct questions to satisfy a blueprint."""

    def __init__(self, topic: str, available: int, requested: int):
        self.topic = topic
        self.available = available
        self.requested = requested
        super().__init__(
            f"topic {topic!r}: requested {requested}, only {available} usable"
        )


class UnknownTest(CareerKitError):
    """Submission references a test id that was never generated."""


class ForeignQuestion(CareerKitError):
    """Submission answers a question that is not part of the test."""
