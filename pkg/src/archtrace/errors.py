"""Exception hierarchy shared by all pipeline stages."""


class ArchTraceError(Exception):
    """Base class for every error raised by archtrace."""


class FormatError(ArchTraceError, ValueError):
    """An input file does not follow the expected layout."""


class KindMismatchError(ArchTraceError, ValueError):
    """Two link sets of incompatible kinds were combined."""


class GatewayError(ArchTraceError):
    """The LLM provider could not be reached or answered with an error."""


class CassetteMissError(GatewayError):
    """Replay mode found no recorded response for a request."""


class EmptyExtractionError(ArchTraceError):
    """An extraction prompt chain produced no component names."""


class MalformedResponseError(ArchTraceError, ValueError):
    """An LLM response could not be parsed into the requested structure."""


class PipelineError(ArchTraceError):
    """A multi-stage run failed; ``stage`` names the failing step."""

    def __init__(self, stage, message):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class UndefinedTestError(ArchTraceError, ValueError):
    """A significance test cannot be computed for the given sample."""
