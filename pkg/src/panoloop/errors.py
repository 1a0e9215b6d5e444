"""Exception hierarchy shared across the package."""


class PanoloopError(Exception):
    """Base class for all package errors."""


class InvalidAngleError(PanoloopError):
    """Yaw angle is not a finite number."""


class InvalidParameterError(PanoloopError):
    """A numeric parameter is outside its legal range."""


class InvalidInputError(PanoloopError):
    """Input payload (frame, audio, prompt, request body) fails validation."""


class EmptyClipError(PanoloopError):
    """Operation requires at least one frame."""


class IncompatibleClipsError(PanoloopError):
    """Clips differ in dimensions or frame rate."""


class PromptTooLongError(PanoloopError):
    """Prompt text exceeds the 2000 character budget."""


class EmptyTranscriptionError(PanoloopError):
    """Transcription produced no text (empty audio or unknown content)."""


class TransientBackendError(PanoloopError):
    """Retryable backend failure (timeout, connection reset, 5xx)."""


class BackendContractError(PanoloopError):
    """Backend returned a payload that violates its contract."""


class GenerationBusyError(PanoloopError):
    """Another generation is already running for this session."""


class OutOfOrderError(PanoloopError):
    """Action requires the previous segment to be ready."""


class SessionFullError(PanoloopError):
    """Session already holds target_segments segments."""


class IncompleteSessionError(PanoloopError):
    """Finalize called before every segment is ready."""


class UnknownSessionError(PanoloopError):
    """Session id not present in the store."""
