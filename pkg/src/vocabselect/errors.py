"""Exception hierarchy shared by all modules."""


class VocabSelectError(ValueError):
    """Base class for every error raised by this package."""


class IngestionError(VocabSelectError):
    """Raised when input text or count files cannot be read."""


class EstimationError(VocabSelectError):
    """Raised when weights cannot be estimated from the given corpora."""
