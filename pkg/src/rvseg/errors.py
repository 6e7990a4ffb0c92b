"""Exception types shared across the pipeline."""


class PipelineError(Exception):
    """Base class for errors raised by this package."""


class BackendError(PipelineError):
    """A model backend (selector, segmenter, or propagator) failed.

    Carries the HTTP status when the failure came off the wire.
    """

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class TranscriptParseError(PipelineError):
    """A selector transcript could not be parsed into selections."""

    def __init__(self, message: str, transcript: str = ""):
        super().__init__(message)
        self.transcript = transcript


class RleFormatError(ValueError):
    """A run-length record is inconsistent with its declared dimensions."""


class SessionUsageError(RuntimeError):
    """A propagation session was driven out of order (e.g. run before seed)."""


class RunError(PipelineError):
    """An offline run could not produce a result.

    When caused by an unparseable selector response, ``transcript`` holds
    the raw model text for post-mortem inspection.
    """

    def __init__(self, message: str, transcript: str = ""):
        super().__init__(message)
        self.transcript = transcript


class DatasetError(PipelineError):
    """A benchmark directory tree or manifest could not be loaded."""

    def __init__(self, message: str, gaps: list[str] | None = None):
        super().__init__(message)
        self.gaps = gaps or []


class ConfigError(ValueError):
    """Invalid or unknown configuration keys/values."""
